/**
 * @file test_higher.cpp
 * @brief Arbitrary-order bound constructions: mode grouping over an
 *        inner decomposer, the shared stabilizing correction, and the
 *        term-count/residual guarantees of the full decomposition.
 */
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "htr/bound2222.hpp"
#include "htr/higher.hpp"
#include "htr/pencil.hpp"
#include "htr/rank222.hpp"
#include "support.hpp"

using namespace htr;
using namespace htr::testing;

namespace {

/// Inner decomposer for order-1 blocks: the block is a single vector,
/// hence one term (or none when it vanishes).
[[nodiscard]] InnerDecomposer vector_reader() {
    InnerDecomposer inner;
    inner.bound = 1;
    inner.run = [](const Tensor& b) {
        Decomposition d;
        d.field = b.field();
        d.order = 1;
        const Vec2 v{b.at(0), b.at(1)};
        if (!is_zero(v)) d.terms.emplace_back(std::vector<Vec2>{v});
        return d;
    };
    return inner;
}

/// Inner decomposer for order-3 blocks via the slice-pair path.
[[nodiscard]] InnerDecomposer slice_pair_decomposer(Field field) {
    InnerDecomposer inner;
    inner.bound = 3;
    inner.run = [field](const Tensor& b) {
        return decompose222(slice_pair(b), field);
    };
    return inner;
}

[[nodiscard]] bool is_basis_vector(const Vec2& v) {
    return (v[0] == cplx{1.0} && v[1] == cplx{0.0}) ||
           (v[0] == cplx{0.0} && v[1] == cplx{1.0});
}

}  // namespace

TEST_CASE("mode grouping tensors block terms with trailing basis vectors") {
    Rng rng(501);
    const Tensor t = gaussian_tensor(rng, 4, Field::real);
    const HigherBound hb = mode_group_bound(t, 1, vector_reader());

    CHECK(hb.bound == 8);
    CHECK(hb.construction == HigherConstruction::mode_group);
    CHECK(hb.decomposition.order == 4);
    CHECK(hb.decomposition.rank_bound() <= 8);
    // Splitting off single vectors reconstructs the tensor exactly.
    CHECK(residual(t, hb.decomposition) == 0.0);
    for (const auto& term : hb.decomposition.terms) {
        REQUIRE(term.order() == 4);
        CHECK(is_basis_vector(term.factors[1]));
        CHECK(is_basis_vector(term.factors[2]));
        CHECK(is_basis_vector(term.factors[3]));
    }
}

TEST_CASE("mode grouping at the order-3 split runs the slice-pair path") {
    Rng rng(502);
    for (int draw = 0; draw < 10; ++draw) {
        const Tensor t = gaussian_tensor(rng, 4, Field::real);
        const HigherBound hb = mode_group_bound(t, 3, slice_pair_decomposer(Field::real));
        CHECK(hb.bound == 6);
        CHECK(hb.decomposition.rank_bound() <= 6);
        CHECK(residual(t, hb.decomposition) <= 1e-8 * t.frobenius_norm());
    }
}

TEST_CASE("mode grouping rejects bad splits and broken inner promises") {
    Rng rng(503);
    const Tensor t = gaussian_tensor(rng, 4, Field::real);

    CHECK_THROWS_AS((void)mode_group_bound(t, 0, vector_reader()),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)mode_group_bound(t, 4, vector_reader()),
                    std::invalid_argument);

    InnerDecomposer missing;
    missing.bound = 1;
    CHECK_THROWS_AS((void)mode_group_bound(t, 1, missing),
                    std::invalid_argument);

    // An inner decomposer that claims zero terms but produces one.
    InnerDecomposer liar = vector_reader();
    liar.bound = 0;
    CHECK_THROWS_AS((void)mode_group_bound(t, 1, liar), std::runtime_error);

    // An inner decomposer that returns the wrong order.
    InnerDecomposer wrong_order;
    wrong_order.bound = 8;
    wrong_order.run = [](const Tensor&) {
        Decomposition d;
        d.order = 2;
        return d;
    };
    CHECK_THROWS_AS((void)mode_group_bound(t, 1, wrong_order),
                    std::runtime_error);
}

TEST_CASE("complex order-5 grouping over the order-4 decomposer gives eight terms") {
    Rng rng(504);
    Rng inner_rng(505);
    const Tensor t = gaussian_tensor(rng, 5, Field::complex);

    InnerDecomposer inner;
    inner.bound = 4;
    inner.run = [&inner_rng](const Tensor& block) {
        return bound_complex(quad_tensor(block), inner_rng).decomposition;
    };
    const HigherBound hb = mode_group_bound(t, 4, inner);

    CHECK(hb.bound == 8);
    CHECK(hb.decomposition.rank_bound() <= 8);
    CHECK(hb.decomposition.field == Field::complex);
    CHECK(residual(t, hb.decomposition) <= 1e-8 * t.frobenius_norm());
}

TEST_CASE("pencil invariant against a rank-one direction is a perfect square") {
    // Oracle: for C0 = (s,t)^T (u,v) and A = [[a,b],[c,d]], the pencil
    // invariant of (A; C0) equals (s(ud - vc) - t(ub - va))^2.
    Rng rng(506);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 A = rng.gaussian_mat2(Field::real);
        const double s = rng.uniform(-3.0, 3.0);
        const double t = rng.uniform(-3.0, 3.0);
        const double u = rng.uniform(-3.0, 3.0);
        const double v = rng.uniform(-3.0, 3.0);
        const Mat2 C0 = Mat2::outer({cplx{s}, cplx{t}}, {cplx{u}, cplx{v}});
        const double a = A.at(0, 0).real();
        const double b = A.at(0, 1).real();
        const double c = A.at(1, 0).real();
        const double d = A.at(1, 1).real();
        const double lin = s * (u * d - v * c) - t * (u * b - v * a);
        const double dv = delta(A, C0).value.real();
        CHECK(std::abs(dv - lin * lin) <= 1e-10 * (1.0 + lin * lin));
        CHECK(dv >= -1e-12);
    }
    // The identity slice with direction e1 e1^T: the square form is 1.
    const Mat2 E = Mat2::identity();
    const Mat2 D = Mat2::outer({cplx{1.0}, cplx{0.0}}, {cplx{1.0}, cplx{0.0}});
    CHECK(delta(E, D).value.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(delta(E, D).is_positive());
}

TEST_CASE("stabilizing direction corrects a single pair") {
    Rng rng(507);
    const std::vector<SlicePair> pairs{
        {Mat2::identity(), rng.gaussian_mat2(Field::real)}};
    Rng srng(508);
    const Mat2 c = stabilizing_rank_one(pairs, srng);

    CHECK(c.det() == cplx{});  // exactly rank one by construction
    CHECK(!c.is_zero());
    CHECK(delta(pairs[0].a, c).is_positive());
    const Rank222Report rep = classify({pairs[0].a, pairs[0].b + c}, Field::real);
    CHECK(rep.rank <= 2);
}

TEST_CASE("stabilizing direction fixes eight random pairs at once") {
    Rng rng(509);
    std::vector<SlicePair> pairs;
    for (int j = 0; j < 8; ++j) {
        pairs.push_back({rng.gaussian_mat2(Field::real),
                         rng.gaussian_mat2(Field::real)});
    }
    // A pair whose first slice vanishes needs no condition and must not
    // block the search.
    pairs.push_back({Mat2::zero(), rng.gaussian_mat2(Field::real)});

    Rng srng(510);
    const Mat2 c = stabilizing_rank_one(pairs, srng);
    CHECK(c.det() == cplx{});
    for (const auto& p : pairs) {
        if (p.a.is_zero()) continue;
        CHECK(delta(p.a, p.b + c).is_positive());
        CHECK(classify({p.a, p.b + c}, Field::real).rank <= 2);
    }
}

TEST_CASE("stabilized decomposition meets the term bound at orders four to six") {
    for (int order = 4; order <= 6; ++order) {
        const int bound = (1 << (order - 2)) + 1;
        for (int draw = 0; draw < 20; ++draw) {
            Rng rng = Rng::derive(511, 100 * order + draw);
            const Tensor t = gaussian_tensor(rng, order, Field::real);
            Rng drng = Rng::derive(512, 100 * order + draw);
            const HigherBound hb = decompose_higher(t, Field::real, drng);

            CHECK(hb.bound == bound);
            CHECK(hb.construction == HigherConstruction::stabilized);
            CHECK(hb.decomposition.field == Field::real);
            CHECK(hb.decomposition.order == order);
            CHECK(hb.decomposition.rank_bound() <= bound);
            CHECK(residual(t, hb.decomposition) <= 1e-8 * t.frobenius_norm());
        }
    }
}

TEST_CASE("orders two and three delegate to the matrix and slice-pair paths") {
    Rng rng(513);

    Tensor m(2, Field::real);
    m.at(0, 0) = 3.0;
    m.at(0, 1) = 1.0;
    m.at(1, 1) = 2.0;
    const HigherBound h2 = decompose_higher(m, Field::real, rng);
    CHECK(h2.bound == 2);
    CHECK(h2.decomposition.rank_bound() <= 2);
    CHECK(residual(m, h2.decomposition) == 0.0);

    const Tensor t3 = gaussian_tensor(rng, 3, Field::real);
    const HigherBound h3 = decompose_higher(t3, Field::real, rng);
    CHECK(h3.bound == 3);
    CHECK(h3.decomposition.rank_bound() <= 3);
    CHECK(residual(t3, h3.decomposition) <= 1e-8 * t3.frobenius_norm());

    Tensor v(1, Field::real);
    v.at(0) = 1.0;
    CHECK_THROWS_AS((void)decompose_higher(v, Field::real, rng),
                    std::invalid_argument);
}

TEST_CASE("zero tensors decompose into no terms") {
    Rng rng(514);
    const Tensor z(5, Field::real);
    const HigherBound hb = decompose_higher(z, Field::real, rng);
    CHECK(hb.decomposition.terms.empty());
    CHECK(hb.bound == 9);
    CHECK(residual(z, hb.decomposition) == 0.0);
}

TEST_CASE("higher decomposition is deterministic for a fixed generator") {
    Rng trng(515);
    const Tensor t = gaussian_tensor(trng, 5, Field::real);
    Rng r1(516);
    Rng r2(516);
    const HigherBound a = decompose_higher(t, Field::real, r1);
    const HigherBound b = decompose_higher(t, Field::real, r2);

    REQUIRE(a.decomposition.rank_bound() == b.decomposition.rank_bound());
    for (std::size_t i = 0; i < a.decomposition.terms.size(); ++i) {
        const auto& fa = a.decomposition.terms[i].factors;
        const auto& fb = b.decomposition.terms[i].factors;
        REQUIRE(fa.size() == fb.size());
        for (std::size_t f = 0; f < fa.size(); ++f) {
            CHECK(fa[f][0] == fb[f][0]);
            CHECK(fa[f][1] == fb[f][1]);
        }
    }
}

TEST_CASE("complex input routes through the order-4 decomposer") {
    Rng trng(517);
    Rng rng(518);

    const Tensor t4 = gaussian_tensor(trng, 4, Field::complex);
    const HigherBound h4 = decompose_higher(t4, Field::complex, rng);
    CHECK(h4.bound == 4);
    CHECK(h4.decomposition.rank_bound() <= 4);
    CHECK(h4.construction == HigherConstruction::mode_group);
    CHECK(residual(t4, h4.decomposition) <= 1e-8 * t4.frobenius_norm());

    const Tensor t6 = gaussian_tensor(trng, 6, Field::complex);
    const HigherBound h6 = decompose_higher(t6, Field::complex, rng);
    CHECK(h6.bound == 16);
    CHECK(h6.decomposition.rank_bound() <= 16);
    CHECK(h6.construction == HigherConstruction::mode_group);
    CHECK(residual(t6, h6.decomposition) <= 1e-8 * t6.frobenius_norm());
}
