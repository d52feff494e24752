/**
 * @file rank222.cpp
 * @brief Order-3 rank classification and constructive decompositions.
 */
#include "htr/rank222.hpp"

#include <algorithm>
#include <stdexcept>

namespace htr {

namespace {

constexpr double kRankOneRatio = 1e-9;  // sigma2 <= ratio * sigma1

/// Whether the 2xN matrix with rows x and y has sigma2 <= ratio * sigma1.
/// Projects the smaller row off the larger one and compares the residual
/// against the scale; the residual brackets sigma2 within a factor sqrt(2),
/// and unlike the closed-form Gram eigenvalues it does not lose half the
/// working precision to cancellation when the rows are nearly parallel.
bool rows_rank_at_most_one(std::vector<cplx> x, std::vector<cplx> y) {
    double nx = 0.0, ny = 0.0;
    for (const cplx& e : x) nx += std::norm(e);
    for (const cplx& e : y) ny += std::norm(e);
    if (nx < ny) {
        std::swap(x, y);
        std::swap(nx, ny);
    }
    if (nx == 0.0) return true;
    cplx coeff{};
    for (std::size_t i = 0; i < x.size(); ++i) coeff += std::conj(x[i]) * y[i];
    coeff /= nx;
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) res += std::norm(y[i] - coeff * x[i]);
    return res <= kRankOneRatio * kRankOneRatio * nx;
}

/// Dimension (0, 1, or 2) of the span of two length-4 vectors.
int span_dim(const std::array<cplx, 4>& u, const std::array<cplx, 4>& v) {
    bool zu = true, zv = true;
    for (const cplx& e : u) zu = zu && e == cplx{};
    for (const cplx& e : v) zv = zv && e == cplx{};
    if (zu && zv) return 0;
    return rows_rank_at_most_one({u.begin(), u.end()}, {v.begin(), v.end()})
               ? 1
               : 2;
}

/// Whether every mode unfolding of the order-3 tensor has matrix rank 1.
bool all_unfoldings_rank_one(const Tensor& t) {
    for (int mode = 0; mode < 3; ++mode) {
        std::vector<cplx> rows[2];
        for (std::size_t off = 0; off < t.size(); ++off) {
            const int i = static_cast<int>((off >> (2 - mode)) & 1U);
            rows[i].push_back(t.data()[off]);
        }
        if (!rows_rank_at_most_one(rows[0], rows[1])) return false;
    }
    return true;
}

/// Result of scanning the pencil x*A + y*B for a well-conditioned
/// nonsingular element.
struct PencilScan {
    bool found = false;
    Mat2 mix = Mat2::identity();  // mode-3 matrix [[x, y], [-y, x]]
    Mat2 a_prime;                 // x*A + y*B
    Mat2 b_prime;                 // -y*A + x*B
};

/// det(x*A + y*B) is a binary quadratic form, so if it vanishes at the
/// five scanned directions it vanishes identically; otherwise the best
/// normalized determinant margin picks a stable representative.
PencilScan scan_pencil(const Mat2& a, const Mat2& b) {
    static constexpr double kDirs[5][2] = {
        {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, -1.0}, {1.0, 2.0}};
    PencilScan best;
    double best_margin = 0.0;
    for (const auto& d : kDirs) {
        const cplx x{d[0], 0.0}, y{d[1], 0.0};
        const Mat2 m = x * a + y * b;
        const double nf = m.frobenius_norm();
        if (nf == 0.0) continue;
        const double margin = std::abs(m.det()) / (nf * nf);
        if (margin > best_margin) {
            best_margin = margin;
            best.mix = Mat2{x, y, -y, x};
            best.a_prime = m;
            best.b_prime = cplx(-1.0) * y * a + x * b;
        }
    }
    best.found = best_margin > 1e-12;
    return best;
}

/// One rank-one term recovered from a tensor that passed the rank-1 test;
/// exact when the entries are exact.
RankOneTerm extract_rank_one(const Tensor& t) {
    std::vector<int> pivot(3, 0);
    double best = -1.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                const double v = std::abs(t.at(i, j, k));
                if (v > best) {
                    best = v;
                    pivot = {i, j, k};
                }
            }
        }
    }
    const cplx p = t.at(pivot[0], pivot[1], pivot[2]);
    const Vec2 u{t.at(0, pivot[1], pivot[2]), t.at(1, pivot[1], pivot[2])};
    const Vec2 v{t.at(pivot[0], 0, pivot[2]) / p,
                 t.at(pivot[0], 1, pivot[2]) / p};
    const Vec2 w{t.at(pivot[0], pivot[1], 0) / p,
                 t.at(pivot[0], pivot[1], 1) / p};
    return RankOneTerm({u, v, w});
}

void append_term(Decomposition& d, const Vec2& u, const Vec2& v,
                 const Vec2& w) {
    d.terms.emplace_back(std::vector<Vec2>{u, v, w});
}

/// Rank-2 decomposition when every pencil element is singular: both slices
/// are then nonzero rank-one matrices sharing a left or right factor.
void decompose_singular_pencil(const SlicePair& t, Decomposition& out) {
    const double scale = t.norm_sum();
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    if (t.a.frobenius_norm() <= 1e-14 * scale) {
        // (O; B): split B over its columns.
        for (int j = 0; j < 2; ++j) {
            const Vec2 col = t.b.col(j);
            if (norm2(col) == 0.0) continue;
            append_term(out, col, j == 0 ? e1 : e2, e2);
        }
        return;
    }
    if (t.b.frobenius_norm() <= 1e-14 * scale) {
        for (int j = 0; j < 2; ++j) {
            const Vec2 col = t.a.col(j);
            if (norm2(col) == 0.0) continue;
            append_term(out, col, j == 0 ? e1 : e2, e1);
        }
        return;
    }
    // Both slices are nonzero rank-one matrices (with a shared factor, by
    // the identity det(u a^T + w b^T) = det(u, w) det(a, b)); factoring each
    // slice exactly gives an exact two-term decomposition.
    const auto [ua, va] = rank_one_factors2(t.a);
    const auto [ub, vb] = rank_one_factors2(t.b);
    append_term(out, ua, va, e1);
    append_term(out, ub, vb, e2);
}

/// Rank <= 2 decomposition through a nonsingular pencil element: with
/// A' = x A + y B invertible and W = A'^{-1} B', eigenstructure of W
/// separates the pair into <= 2 terms.
void decompose_via_pencil(const PencilScan& scan, Decomposition& out) {
    const Mat2& ap = scan.a_prime;
    const Mat2& bp = scan.b_prime;
    const Mat2 mix_inv = scan.mix.inverse();
    const Mat2 w = ap.inverse() * bp;
    const cplx half_trace = 0.5 * w.trace();
    const Mat2 deviat = w - half_trace * Mat2::identity();
    if (deviat.frobenius_norm() <= 1e-9 * std::max(1.0, w.frobenius_norm())) {
        // B' = lambda A': the pair is A' tensored with (1, lambda).
        const Vec2 dir = mix_inv * Vec2{1.0, half_trace};
        const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
        for (int j = 0; j < 2; ++j) {
            const Vec2 col = ap.col(j);
            if (norm2(col) == 0.0) continue;
            append_term(out, col, j == 0 ? e1 : e2, dir);
        }
        return;
    }
    const auto ev = eigenvalues2(w);
    Mat2 v;
    for (int k = 0; k < 2; ++k) {
        const Vec2 vk = eigenvector2(w, ev[static_cast<std::size_t>(k)]);
        v.at(0, k) = vk[0];
        v.at(1, k) = vk[1];
    }
    const Mat2 u = ap * v;
    const Mat2 v_inv = v.inverse();
    for (int k = 0; k < 2; ++k) {
        append_term(out, u.col(k), v_inv.row(k),
                    mix_inv * Vec2{1.0, ev[static_cast<std::size_t>(k)]});
    }
}

/// The three integer terms of (E; S), S = [[0,1],[0,0]].
void append_es_terms(Decomposition& out) {
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    append_term(out, e1, e1, e1);
    append_term(out, e2, e2, e1);
    append_term(out, e1, e2, e2);
}

/// The three integer terms of (E; J) with J = [[0,1],[-1,0]].
void append_rotation_terms(Decomposition& out) {
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    append_term(out, e1, e1, {1.0, 1.0});
    append_term(out, e2, e2, {1.0, -1.0});
    append_term(out, {1.0, 1.0}, {1.0, -1.0}, {0.0, -1.0});
}

/// Real rank-3 decomposition for Delta < 0: the pencil-reduced multiplier
/// W has a conjugate eigenvalue pair p +- qi; in the real basis of that
/// pair the tensor becomes (E; pE + qJ), and (E; J) has an explicit
/// 3-term decomposition.
void decompose_rotation_type(const PencilScan& scan, Decomposition& out) {
    const Mat2& ap = scan.a_prime;
    const Mat2 w = ap.inverse() * scan.b_prime;
    const auto ev = eigenvalues2(w);
    const cplx lambda =
        (ev[0].imag() > 0.0) ? ev[0] : ev[1];  // the root in the upper plane
    const Vec2 vec = eigenvector2(w, lambda);
    // Real and imaginary parts of the eigenvector span the invariant plane.
    Mat2 v{vec[0].real(), vec[0].imag(), vec[1].real(), vec[1].imag()};
    const Mat2 v_inv = v.inverse();
    const Mat2 c = v_inv * w * v;  // ~ [[p, q], [-q, p]]
    const cplx p = 0.5 * (c.at(0, 0) + c.at(1, 1));
    const cplx q = 0.5 * (c.at(0, 1) - c.at(1, 0));
    Decomposition base;
    base.field = out.field;
    base.order = 3;
    append_rotation_terms(base);
    const Mat2 u = ap * v;
    const Mat2 mode3 = scan.mix.inverse() * Mat2{1.0, 0.0, p, q};
    const GLAction g({u, v_inv.transpose(), mode3});
    for (const auto& term : gl_action(g, base).terms) out.terms.push_back(term);
}

}  // namespace

Rank222Report classify(const SlicePair& t, Field field) {
    Rank222Report r;
    r.delta = delta(t.a, t.b);
    r.theta = theta(t.a, t.b);
    r.theta_tol = theta_tolerance(t.a, t.b);
    r.dim_slice_span = span_dim(vec2x2(t.a), vec2x2(t.b));
    const Vec2 a1 = t.a.col(0), a2 = t.a.col(1);
    const Vec2 b1 = t.b.col(0), b2 = t.b.col(1);
    r.dim_column_span =
        span_dim({a1[0], a1[1], b1[0], b1[1]}, {a2[0], a2[1], b2[0], b2[1]});
    const bool theta_zero = std::abs(r.theta) <= r.theta_tol;
    r.conditions[0] = r.dim_slice_span <= 1;
    r.conditions[1] = r.dim_column_span <= 1;
    r.conditions[2] = r.delta.is_zero() && theta_zero;
    r.conditions[3] = (field == Field::real) ? r.delta.is_positive()
                                             : r.delta.is_nonzero();

    const Tensor dense = to_tensor(t, field);
    if (dense.is_zero()) {
        r.rank = 0;
        return r;
    }
    if (all_unfoldings_rank_one(dense)) {
        r.rank = 1;
        return r;
    }
    // The zero window of the quartic is deliberately conservative, so it
    // also swallows tensors whose discriminant is small but honestly
    // nonzero; those are plain rank 2.  Genuine members of the double-root
    // stratum sit at the arithmetic rounding floor instead, several orders
    // of magnitude below the window, and only for them does the Jordan
    // construction apply.
    const bool delta_at_rounding_floor =
        std::abs(r.delta.value) <= 3e-5 * r.delta.tolerance;
    const bool double_root_rank3 = r.dim_slice_span == 2 &&
                                   r.dim_column_span == 2 &&
                                   r.delta.is_zero() &&
                                   delta_at_rounding_floor && !theta_zero;
    const bool rank3 = (field == Field::real)
                           ? (r.delta.is_negative() || double_root_rank3)
                           : double_root_rank3;
    r.rank = rank3 ? 3 : 2;
    return r;
}

Decomposition decompose222(const SlicePair& t, Field field) {
    const Rank222Report report = classify(t, field);
    Decomposition out;
    out.field = field;
    out.order = 3;
    switch (report.rank) {
        case 0:
            return out;
        case 1:
            out.terms.push_back(extract_rank_one(to_tensor(t, field)));
            return out;
        case 2: {
            const PencilScan scan = scan_pencil(t.a, t.b);
            if (scan.found) {
                decompose_via_pencil(scan, out);
            } else {
                decompose_singular_pencil(t, out);
            }
            return out;
        }
        default: {
            if (field == Field::real && report.delta.is_negative()) {
                const PencilScan scan = scan_pencil(t.a, t.b);
                // Delta < 0 rules out an identically singular pencil.
                decompose_rotation_type(scan, out);
                return out;
            }
            const Canonicalization canon = canonicalize_rank3(t);
            Decomposition base;
            base.field = field;
            base.order = 3;
            append_es_terms(base);
            out = gl_action(canon.action.inverse(), base);
            out.field = field;
            return out;
        }
    }
}

Canonicalization canonicalize_rank3(const SlicePair& t) {
    const Rank222Report complex_report = classify(t, Field::complex);
    if (complex_report.rank != 3) {
        throw std::invalid_argument(
            "canonicalize_rank3: input lacks the double-root rank-3 "
            "structure (requires Delta = 0, Theta != 0, full spans)");
    }
    const PencilScan scan = scan_pencil(t.a, t.b);
    if (!scan.found) {
        throw std::invalid_argument(
            "canonicalize_rank3: pencil is identically singular");
    }
    const Mat2& ap = scan.a_prime;
    const Mat2 w = ap.inverse() * scan.b_prime;
    const cplx lambda = 0.5 * w.trace();  // double eigenvalue
    const Mat2 nil = w - lambda * Mat2::identity();
    // nil is nilpotent and nonzero; pick the basis column it moves most.
    const Vec2 img0 = nil.col(0);  // nil * e1
    const Vec2 img1 = nil.col(1);  // nil * e2
    const bool use_e1 = norm2(img0) >= norm2(img1);
    const Vec2 moved = use_e1 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    const Vec2 image = use_e1 ? img0 : img1;
    Mat2 v{image[0], moved[0], image[1], moved[1]};  // columns (nil*v, v)
    const Mat2 u = ap * v;
    const Mat2 shear{1.0, 0.0, -lambda, 1.0};
    const GLAction g({u.inverse(), v.transpose(), shear * scan.mix});
    const SlicePair canonical = slice_pair(gl_action(g, to_tensor(t, Field::complex)));
    const double err = (canonical.a - Mat2::identity()).frobenius_norm() +
                       (canonical.b - Mat2{0.0, 1.0, 0.0, 0.0}).frobenius_norm();
    if (!(err <= 1e-6)) {
        throw std::invalid_argument(
            "canonicalize_rank3: canonical form verification failed "
            "(input is numerically outside the rank-3 stratum)");
    }
    return {g, canonical};
}

}  // namespace htr
