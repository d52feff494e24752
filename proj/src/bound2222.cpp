/**
 * @file bound2222.cpp
 * @brief Order-4 rank bound constructions.
 *
 * Orientation used throughout: an order-4 tensor is the pair of its
 * third-mode halves, and each half is an order-3 slice pair indexed by the
 * fourth mode.  A rank-one term is written (u, v, h, w) with h the
 * third-mode (half-mixing) factor and w the fourth-mode factor.  All
 * constructions reduce to order-3 decompositions of halves and of mixed
 * halves whose Delta has been pushed into the sign region where exactly
 * two terms suffice.
 */
#include "htr/bound2222.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace htr {
namespace {

const Mat2 kIdentity = Mat2::identity();

/// Appends the order-4 term u (x) v (x) h (x) w.
void push_term(std::vector<RankOneTerm>& out, const Vec2& u, const Vec2& v,
               const Vec2& h, const Vec2& w) {
    out.push_back(RankOneTerm{std::vector<Vec2>{u, v, h, w}});
}

/// Appends an order-3 decomposition as order-4 terms sharing the
/// half-mixing factor h.
void append_half_terms(std::vector<RankOneTerm>& out, const Decomposition& d,
                       const Vec2& h) {
    for (const auto& t : d.terms) {
        push_term(out, t.factors[0], t.factors[1], h, t.factors[2]);
    }
}

[[nodiscard]] Decomposition make_decomposition(Field field,
                                               std::vector<RankOneTerm> terms) {
    Decomposition d;
    d.field = field;
    d.order = 4;
    d.terms = std::move(terms);
    return d;
}

/// Candidate mixing parameters: zero, a sign-symmetric doubling ladder up
/// to 2^20, then 64 seeded draws with log-uniform magnitude.  The draws
/// are generated up front so a call always advances the generator by the
/// same amount regardless of where the search stops.
[[nodiscard]] std::vector<double> mixing_schedule(Rng& rng) {
    std::vector<double> xs;
    xs.reserve(43 + 64);
    xs.push_back(0.0);
    for (int e = 0; e <= 20; ++e) {
        const double m = std::ldexp(1.0, e);
        xs.push_back(m);
        xs.push_back(-m);
    }
    for (int i = 0; i < 64; ++i) {
        const double sign = rng.uniform01() < 0.5 ? 1.0 : -1.0;
        xs.push_back(sign * std::exp2(rng.uniform(-4.0, 20.0)));
    }
    return xs;
}

/// base + x * dir, slice-wise.
[[nodiscard]] SlicePair mix_pair(const SlicePair& base, double x,
                                 const SlicePair& dir) {
    return {base.a + cplx(x) * dir.a, base.b + cplx(x) * dir.b};
}

/// Whether the pair's Delta lies in the sign region that forces rank
/// exactly 2: positive over the reals, nonzero over the complex numbers.
[[nodiscard]] bool delta_accepts(const SlicePair& p, Field field) {
    const DeltaValue dv = delta(p.a, p.b);
    return field == Field::real ? dv.is_positive() : dv.is_nonzero();
}

/// Slice pair of a single order-3 term (u, v, w).
[[nodiscard]] SlicePair term_pair(const RankOneTerm& t) {
    const Mat2 m = Mat2::outer(t.factors[0], t.factors[1]);
    return {t.factors[2][0] * m, t.factors[2][1] * m};
}

/// Concatenation of the two half decompositions; always valid, at most
/// rank(first) + rank(second) terms.
[[nodiscard]] Decomposition concat_halves(const QuadTensor& y, Field field) {
    const Decomposition da = decompose222(y.first_half(), field);
    const Decomposition db = decompose222(y.second_half(), field);
    std::vector<RankOneTerm> terms;
    terms.reserve(da.terms.size() + db.terms.size());
    append_half_terms(terms, da, Vec2{1.0, 0.0});
    append_half_terms(terms, db, Vec2{0.0, 1.0});
    return make_decomposition(field, std::move(terms));
}

/// Decomposition plus the construction it came from and the honest bound
/// it carries.
struct RouteResult {
    Decomposition decomposition;
    const char* branch;
    int claimed;
};

/// Best-margin invertible element of the pencil spanned by the pair's
/// slices, probed over five fixed directions.  `partner` is the orthogonal
/// combination completing the rotation of the pair index, `dir` the
/// winning direction.
struct PencilElement {
    bool found = false;
    Mat2 mixed;
    Mat2 partner;
    std::array<double, 2> dir{};
};

[[nodiscard]] PencilElement scan_invertible(const SlicePair& p) {
    constexpr std::array<std::array<double, 2>, 5> dirs{
        {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}, {1.0, 2.0}}};
    PencilElement best;
    double best_margin = 1e-12;
    for (const auto& d : dirs) {
        const Mat2 m = cplx(d[0]) * p.a + cplx(d[1]) * p.b;
        const double n = m.frobenius_norm();
        if (n == 0.0) continue;
        const double margin = std::abs(m.det()) / (n * n);
        if (margin > best_margin) {
            best_margin = margin;
            best.found = true;
            best.mixed = m;
            best.partner = cplx(-d[1]) * p.a + cplx(d[0]) * p.b;
            best.dir = d;
        }
    }
    return best;
}

RouteResult eo_impl(const QuadTensor& y, Field field, Rng& rng);

/// Handles a rank-2 first half whose two slices are (after a pencil
/// rotation and a left factor) the identity and a scalar multiple of it.
/// The pair is transformed to (identity; zero) exactly and the four-way
/// split construction takes over; the transform is undone on the result.
[[nodiscard]] std::optional<RouteResult> scalar_multiple_route(
    const QuadTensor& y, const SlicePair& h1, Field field, Rng& rng) {
    const PencilElement pe = scan_invertible(h1);
    if (!pe.found) return std::nullopt;
    const Mat2 w = pe.mixed.inverse() * pe.partner;
    const cplx lambda = 0.5 * w.trace();
    const Mat2 rem = w - lambda * kIdentity;
    // Only a genuinely scalar ratio qualifies; a small but honest
    // deviation means two close eigenvalues, which the mixing routes
    // handle without flattening the difference away.
    if (rem.frobenius_norm() > 1e-9 * (1.0 + w.frobenius_norm())) {
        return std::nullopt;
    }
    const Mat2 mix{pe.dir[0], pe.dir[1], -pe.dir[1], pe.dir[0]};
    const Mat2 shear{1.0, 0.0, -lambda, 1.0};
    const GLAction g{
        std::vector<Mat2>{pe.mixed.inverse(), kIdentity, kIdentity,
                          shear * mix}};
    QuadTensor yq = quad_tensor(gl_action(g, to_tensor(y, field)));
    yq.block(0, 0) = kIdentity;
    yq.block(0, 1) = Mat2::zero();
    RouteResult eo = eo_impl(yq, field, rng);
    return RouteResult{gl_action(g.inverse(), eo.decomposition), eo.branch,
                       eo.claimed};
}

/// The targeted 4-term routes for a rank-2 first half against a rank-3
/// second half: pencil mixing of the halves, the scalar-ratio reduction,
/// and the rank-one split of the first half.  std::nullopt when all fail.
[[nodiscard]] std::optional<RouteResult> mixed_half_routes(
    const QuadTensor& y, const SlicePair& h1, const SlicePair& h2,
    Field field, Rng& rng) {
    // A first half whose slices are scalar multiples of one matrix (up to
    // a pencil rotation) makes Delta of every mix degenerate; that case
    // goes through its own exact reduction first.
    if (auto r = scalar_multiple_route(y, h1, field, rng)) return r;
    // Half mixing: when Delta of the first half is honestly signed, the
    // quartic x -> Delta(H2 + x H1) inherits it as leading coefficient
    // and the doubling ladder terminates.
    for (const double x : mixing_schedule(rng)) {
        const SlicePair mixed = mix_pair(h2, x, h1);
        if (!delta_accepts(mixed, field)) continue;
        const Decomposition da = decompose222(h1, field);
        const Decomposition dm = decompose222(mixed, field);
        std::vector<RankOneTerm> terms;
        terms.reserve(da.terms.size() + dm.terms.size());
        append_half_terms(terms, da, Vec2{1.0, -x});
        append_half_terms(terms, dm, Vec2{0.0, 1.0});
        return RouteResult{make_decomposition(field, std::move(terms)),
                           "leq2implies4a", 4};
    }
    // Rank-one split of the first half; exact in particular for
    // identically singular pencils, whose slice-wise factorization the
    // order-3 machinery returns directly.
    const Decomposition da = decompose222(h1, field);
    if (da.terms.size() == 2) {
        for (int ordering = 0; ordering < 2; ++ordering) {
            const SlicePair t1 = term_pair(da.terms[ordering == 0 ? 0 : 1]);
            const SlicePair t2 = term_pair(da.terms[ordering == 0 ? 1 : 0]);
            if (auto d = split_and_separate(t1, t2, h2, field, rng)) {
                return RouteResult{std::move(*d), "onewayseparate", 4};
            }
        }
    }
    return std::nullopt;
}

/// Reverses reorder_modes on the terms of a decomposition.
[[nodiscard]] Decomposition unreorder_terms(const Decomposition& d,
                                            const std::array<int, 4>& perm) {
    Decomposition out;
    out.field = d.field;
    out.order = 4;
    out.terms.reserve(d.terms.size());
    for (const auto& t : d.terms) {
        std::vector<Vec2> fs(4);
        for (int s = 0; s < 4; ++s) {
            fs[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)]) -
               1] = t.factors[static_cast<std::size_t>(s)];
        }
        out.terms.push_back(RankOneTerm{std::move(fs)});
    }
    return out;
}

[[nodiscard]] RouteResult half_rank2_impl(const QuadTensor& y, Field field,
                                          Rng& rng) {
    const SlicePair h1 = y.first_half();
    const int ra = classify(h1, field).rank;
    if (ra > 2) {
        throw std::invalid_argument(
            "decompose_when_half_rank2: first half must have rank at most 2");
    }
    const SlicePair h2 = y.second_half();
    const int rb = classify(h2, field).rank;
    if (rb <= 2 || ra <= 1) {
        return {concat_halves(y, field), "direct", 4};
    }
    if (auto r = mixed_half_routes(y, h1, h2, field, rng)) {
        return std::move(*r);
    }
    // Every targeted route failed (an identically singular first-half
    // pencil can do that): retry the same routes on the other essential
    // flattenings and with the halves swapped, undoing the relabeling on
    // the result.
    const Tensor dense = to_tensor(y, field);
    const Mat2 swap_halves{0.0, 1.0, 1.0, 0.0};
    const auto flats = essential_flattenings();
    for (std::size_t f = 0; f < flats.size(); ++f) {
        for (int flip = 0; flip < 2; ++flip) {
            if (f == 0 && flip == 0) continue;  // the orientation just tried
            Tensor tp = reorder_modes(
                dense, std::vector<int>(flats[f].begin(), flats[f].end()));
            std::optional<GLAction> g;
            if (flip == 1) {
                g = GLAction{std::vector<Mat2>{kIdentity, kIdentity,
                                               swap_halves, kIdentity}};
                tp = gl_action(*g, tp);
            }
            const QuadTensor qp = quad_tensor(tp);
            const SlicePair p1 = qp.first_half();
            const int rpa = classify(p1, field).rank;
            if (rpa > 2) continue;
            const SlicePair p2 = qp.second_half();
            const int rpb = classify(p2, field).rank;
            std::optional<RouteResult> r;
            if (rpb <= 2 || rpa <= 1) {
                r = RouteResult{concat_halves(qp, field), "direct", 4};
            } else {
                r = mixed_half_routes(qp, p1, p2, field, rng);
            }
            if (!r) continue;
            Decomposition d = std::move(r->decomposition);
            if (g) d = gl_action(g->inverse(), d);
            d = unreorder_terms(d, flats[f]);
            return {std::move(d), r->branch, r->claimed};
        }
    }
    return {concat_halves(y, field), "degenerate-fallback", 5};
}

RouteResult eo_impl(const QuadTensor& y, Field field, Rng& rng) {
    const double whole = y.first_half().norm_sum() + y.second_half().norm_sum();
    const double dev = (y.block(0, 0) - kIdentity).frobenius_norm() +
                       y.block(0, 1).frobenius_norm();
    if (dev > 1e-6 * (1.0 + whole)) {
        throw std::invalid_argument(
            "decompose_eo_form: first half is not (identity; zero)");
    }
    const SlicePair bh{y.block(1, 0), y.block(1, 1)};
    const Mat2& b2 = bh.b;
    const double ctol = 1e-12 * bh.norm_sum();
    // Rank-one splits E = C + C', each paired with dot(C, B2), whose
    // square is the x^2 growth coefficient of Delta along the pencil
    // (B1 + xC; B2); a nonzero pairing makes that split's search
    // succeed.  The symmetric splits all pair to zero against the
    // antisymmetric part of B2, so two shear splits are included; the
    // eight pairings vanish jointly only when B2 itself vanishes.
    const Mat2 s1{1.0, 0.0, 0.0, 0.0};
    const Mat2 s2{0.0, 0.0, 0.0, 1.0};
    const Mat2 s3{0.5, 0.5, 0.5, 0.5};
    const Mat2 s4{0.5, -0.5, -0.5, 0.5};
    const Mat2 u1{1.0, 1.0, 0.0, 0.0};
    const Mat2 u2{0.0, -1.0, 0.0, 1.0};
    const Mat2 l1{1.0, 0.0, 1.0, 0.0};
    const Mat2 l2{0.0, 0.0, -1.0, 1.0};
    struct Split {
        const Mat2* lead;
        const Mat2* rest;
        cplx form;
    };
    std::array<Split, 8> splits{{{&s1, &s2, {}},
                                 {&s2, &s1, {}},
                                 {&s3, &s4, {}},
                                 {&s4, &s3, {}},
                                 {&u1, &u2, {}},
                                 {&u2, &u1, {}},
                                 {&l1, &l2, {}},
                                 {&l2, &l1, {}}}};
    for (auto& s : splits) s.form = dot(*s.lead, b2);
    std::stable_sort(splits.begin(), splits.end(),
                     [](const Split& a, const Split& b) {
                         return std::abs(a.form) > std::abs(b.form);
                     });
    bool any_form = false;
    for (const Split& s : splits) {
        if (std::abs(s.form) <= ctol) break;
        any_form = true;
        const SlicePair t1{*s.lead, Mat2::zero()};
        const SlicePair t2{*s.rest, Mat2::zero()};
        if (auto d = split_and_separate(t1, t2, bh, field, rng)) {
            return {std::move(*d), "onepartiszero", 4};
        }
    }
    if (!any_form || b2.frobenius_norm() <= 1e-8 * (1.0 + bh.norm_sum())) {
        // The last block vanishes: everything lives in the first slice of
        // the fourth mode, an order-3 pair with rank at most 3.
        const Decomposition d3 = decompose222(
            SlicePair{y.block(0, 0), y.block(1, 0)}, field);
        std::vector<RankOneTerm> terms;
        terms.reserve(d3.terms.size());
        for (const auto& t : d3.terms) {
            push_term(terms, t.factors[0], t.factors[1], t.factors[2],
                      Vec2{1.0, 0.0});
        }
        return {make_decomposition(field, std::move(terms)), "onepartiszero",
                4};
    }
    return {concat_halves(y, field), "degenerate-fallback", 5};
}

}  // namespace

std::optional<Decomposition> split_and_separate(const SlicePair& t1,
                                                const SlicePair& t2,
                                                const SlicePair& b,
                                                Field field, Rng& rng) {
    if (classify(t1, field).rank != 1 || classify(t2, field).rank != 1) {
        throw std::invalid_argument(
            "split_and_separate: T1 and T2 must have rank one");
    }
    const Decomposition d1 = decompose222(t1, field);
    const Decomposition d2 = decompose222(t2, field);
    for (const double x : mixing_schedule(rng)) {
        const SlicePair mixed = mix_pair(b, x, t1);
        if (!delta_accepts(mixed, field)) continue;
        const Decomposition dm = decompose222(mixed, field);
        std::vector<RankOneTerm> terms;
        terms.reserve(2 + dm.terms.size());
        append_half_terms(terms, d1, Vec2{1.0, -x});
        append_half_terms(terms, d2, Vec2{1.0, 0.0});
        append_half_terms(terms, dm, Vec2{0.0, 1.0});
        return make_decomposition(field, std::move(terms));
    }
    return std::nullopt;
}

Decomposition decompose_eo_form(const QuadTensor& y, Field field, Rng& rng) {
    return eo_impl(y, field, rng).decomposition;
}

Decomposition decompose_when_half_rank2(const QuadTensor& y, Field field,
                                        Rng& rng) {
    return half_rank2_impl(y, field, rng).decomposition;
}

BoundResult bound_real(const QuadTensor& y, Rng& rng) {
    const Tensor dense = to_tensor(y, Field::real);
    if (dense.is_zero()) {
        return {make_decomposition(Field::real, {}), 0, "direct"};
    }
    const SlicePair h1 = y.first_half();
    if (classify(h1, Field::real).rank <= 2) {
        RouteResult r = half_rank2_impl(y, Field::real, rng);
        return {std::move(r.decomposition), r.claimed, r.branch};
    }
    // Rank-3 first half: peel one of its three rank-one terms; the rest of
    // that half is a sum of two rank-one pairs, so the 4-term machinery
    // applies to the remainder.
    const Decomposition d3 = decompose222(h1, Field::real);
    for (const RankOneTerm& t : d3.terms) {
        RankOneTerm peeled{std::vector<Vec2>{t.factors[0], t.factors[1],
                                             Vec2{1.0, 0.0}, t.factors[2]}};
        const Tensor remainder = dense - rank_one(peeled, Field::real);
        const QuadTensor qr = quad_tensor(remainder);
        if (classify(qr.first_half(), Field::real).rank > 2) continue;
        RouteResult r = half_rank2_impl(qr, Field::real, rng);
        std::vector<RankOneTerm> terms;
        terms.reserve(1 + r.decomposition.terms.size());
        terms.push_back(std::move(peeled));
        for (auto& u : r.decomposition.terms) terms.push_back(std::move(u));
        const bool fell_back = r.claimed > 4;
        return {make_decomposition(Field::real, std::move(terms)),
                1 + r.claimed, fell_back ? "degenerate-fallback" : "kong5"};
    }
    return {concat_halves(y, Field::real), 6, "degenerate-fallback"};
}

BoundResult bound_complex(const QuadTensor& y, Rng& rng) {
    const Tensor dense = to_tensor(y, Field::complex);
    if (dense.is_zero()) {
        return {make_decomposition(Field::complex, {}), 0, "direct"};
    }
    const SlicePair h1 = y.first_half();
    if (classify(h1, Field::complex).rank <= 2) {
        RouteResult r = half_rank2_impl(y, Field::complex, rng);
        return {std::move(r.decomposition), r.claimed, r.branch};
    }
    // Rank-3 first half: mix the halves by a root of the degree-2
    // polynomial x -> Theta(x H1 + H2), evaluated in the canonical frame
    // of the first half where the leading coefficient is exactly -1.  At
    // a root the mixed half drops to rank at most 2, and the mixing is an
    // invertible action on the third mode that is undone on the result.
    const Canonicalization canon = canonicalize_rank3(h1);
    const SlicePair h2 = y.second_half();
    const SlicePair h2c =
        slice_pair(gl_action(canon.action, to_tensor(h2, Field::complex)));
    const Mat2 s{0.0, 1.0, 0.0, 0.0};
    const cplx q0 = theta(h2c.a, h2c.b);
    const cplx q_plus = theta(kIdentity + h2c.a, s + h2c.b);
    const cplx q_minus = theta(h2c.a - kIdentity, h2c.b - s);
    const cplx c1 = 0.5 * (q_plus - q_minus);
    const cplx c2 = 0.5 * (q_plus + q_minus) - q0;  // -1 up to rounding
    const cplx disc = std::sqrt(c1 * c1 - 4.0 * c2 * q0);
    std::array<cplx, 2> roots{(-c1 + disc) / (2.0 * c2),
                              (-c1 - disc) / (2.0 * c2)};
    if (std::abs(roots[1]) < std::abs(roots[0])) {
        std::swap(roots[0], roots[1]);
    }
    for (const cplx& x0 : roots) {
        if (!(std::abs(x0) < 1e6)) continue;  // keep the action invertible
        const Mat2 p{x0, 1.0, 1.0, 0.0};
        const GLAction g{
            std::vector<Mat2>{kIdentity, kIdentity, p, kIdentity}};
        const QuadTensor mixed = quad_tensor(gl_action(g, dense));
        if (classify(mixed.first_half(), Field::complex).rank > 2) continue;
        RouteResult r = half_rank2_impl(mixed, Field::complex, rng);
        Decomposition d = gl_action(g.inverse(), r.decomposition);
        const bool fell_back = r.claimed > 4;
        return {std::move(d), std::max(4, r.claimed),
                fell_back ? "degenerate-fallback" : "brylinski4"};
    }
    return {concat_halves(y, Field::complex), 6, "degenerate-fallback"};
}

SliceRankTable slice_rank_profile(const QuadTensor& y, Field field) {
    SliceRankTable out{};
    const Tensor dense = to_tensor(y, field);
    const auto flats = essential_flattenings();
    for (std::size_t f = 0; f < flats.size(); ++f) {
        const QuadTensor q = quad_tensor(reorder_modes(
            dense, std::vector<int>(flats[f].begin(), flats[f].end())));
        out[f] = {
            classify(SlicePair{q.block(0, 0), q.block(0, 1)}, field).rank,
            classify(SlicePair{q.block(0, 0), q.block(1, 0)}, field).rank,
            classify(SlicePair{q.block(1, 0), q.block(1, 1)}, field).rank,
            classify(SlicePair{q.block(0, 1), q.block(1, 1)}, field).rank,
        };
    }
    return out;
}

int unfolding_rank(const QuadTensor& y, double rel_tol) {
    Mat4c m = quad_unfolding_matrix(y);
    const double tol = rel_tol * m.frobenius_norm();
    std::array<bool, 4> row_used{};
    std::array<bool, 4> col_used{};
    int rank = 0;
    for (int step = 0; step < 4; ++step) {
        int pi = -1;
        int pj = -1;
        double best = tol;
        for (int i = 0; i < 4; ++i) {
            if (row_used[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < 4; ++j) {
                if (col_used[static_cast<std::size_t>(j)]) continue;
                const double v = std::abs(m.at(i, j));
                if (v > best) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0) break;
        row_used[static_cast<std::size_t>(pi)] = true;
        col_used[static_cast<std::size_t>(pj)] = true;
        ++rank;
        const cplx pivot = m.at(pi, pj);
        for (int i = 0; i < 4; ++i) {
            if (row_used[static_cast<std::size_t>(i)]) continue;
            const cplx f = m.at(i, pj) / pivot;
            for (int j = 0; j < 4; ++j) m.at(i, j) -= f * m.at(pi, j);
        }
    }
    return rank;
}

QuadTensor slice_rank3_example() {
    QuadTensor q;
    q.block(0, 0) = Mat2{1.0, 0.0, 0.0, 1.0};
    q.block(0, 1) = Mat2{0.0, -1.0, 1.0, 0.0};
    q.block(1, 0) = Mat2{0.0, 2.0, -1.0, 0.0};
    q.block(1, 1) = Mat2{1.0, 0.0, 0.0, 2.0};
    return q;
}

}  // namespace htr
