/**
 * @file test_pencil.cpp
 * @brief Tests for Delta, Theta, dot, nonsingular pairs, and pencil
 *        polynomials.
 */
#include <doctest.h>

#include "htr/pencil.hpp"
#include "htr/rng.hpp"

#include "support.hpp"

using namespace htr;
using namespace htr::testing;

namespace {

/// Independent Delta oracle via the difference form
/// (det(A+B) - det(A-B))^2 / 4 - 4 det(A) det(B).
cplx delta_difference_form(const Mat2& a, const Mat2& b) {
    const cplx half = 0.5 * ((a + b).det() - (a - b).det());
    return half * half - 4.0 * a.det() * b.det();
}

}  // namespace

TEST_CASE("delta on the distinguished integer pairs is exact") {
    CHECK(delta_value(mat_E(), mat_S()) == cplx(0));
    CHECK(delta_value(mat_E(), mat_R()) == cplx(-4));
    CHECK(delta_value(mat_E(), Mat2{1.0, 0.0, 0.0, 2.0}) == cplx(1));
    CHECK(delta(mat_E(), mat_R()).is_negative());
    CHECK(delta(mat_E(), mat_S()).is_zero());
}

TEST_CASE("delta vanishes on equal slices") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 a = rng.gaussian_mat2(Field::complex);
        CHECK(std::abs(delta_value(a, a)) <= 1e-14);
    }
}

TEST_CASE("the two closed forms of delta agree") {
    Rng rng(102);
    for (int trial = 0; trial < 10000; ++trial) {
        const Field f = (trial % 2 == 0) ? Field::real : Field::complex;
        const Mat2 a = rng.gaussian_mat2(f);
        const Mat2 b = rng.gaussian_mat2(f);
        const cplx lhs = delta_value(a, b);
        const cplx rhs = delta_difference_form(a, b);
        const double scale = delta_tolerance(a, b) / 1e-9;  // (|A|+|B|)^4
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("delta is symmetric") {
    Rng rng(103);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat2 a = rng.gaussian_mat2(Field::complex);
        const Mat2 b = rng.gaussian_mat2(Field::complex);
        const double scale = delta_tolerance(a, b) / 1e-9;
        CHECK(std::abs(delta_value(a, b) - delta_value(b, a)) <=
              1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("theta on the distinguished pairs") {
    CHECK(theta(mat_E(), mat_S()) == cplx(-1));
    CHECK(theta(mat_E(), mat_R()) == cplx(-2));
    Rng rng(104);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 a = rng.gaussian_mat2(Field::complex);
        CHECK(std::abs(theta(a, a)) <= 1e-14);
    }
}

TEST_CASE("dot form values and the discriminant identity") {
    CHECK(dot(mat_E(), mat_E()) == cplx(2));
    CHECK(dot(mat_E(), mat_R()) == cplx(0));
    CHECK(dot(mat_E(), Mat2::zero()) == cplx(0));
    Rng rng(105);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat2 a = rng.gaussian_mat2(Field::real);
        const Mat2 b = rng.gaussian_mat2(Field::real);
        CHECK(std::abs(dot(a, b) - dot(b, a)) <= 1e-12);
        const cplx identity = dot(a, b) * dot(a, b) - 4.0 * a.det() * b.det();
        const double scale = delta_tolerance(a, b) / 1e-9;
        CHECK(std::abs(identity - delta_value(a, b)) <=
              1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("delta transformation law under slice-group actions") {
    Rng rng(106);
    for (int trial = 0; trial < 1000; ++trial) {
        const Field f = (trial % 2 == 0) ? Field::real : Field::complex;
        const Tensor t = gaussian_tensor(rng, 3, f);
        const GLAction g = random_gl_action(rng, 3, f);
        const SlicePair before = slice_pair(t);
        const SlicePair after = slice_pair(gl_action(g, t));
        cplx det_factor{1.0, 0.0};
        for (int m = 0; m < 3; ++m) {
            det_factor *= g.mat(m).det() * g.mat(m).det();
        }
        const cplx lhs = delta_value(after.a, after.b);
        const cplx rhs = delta_value(before.a, before.b) * det_factor;
        const double scale =
            std::max({1.0, std::abs(lhs), std::abs(rhs)});
        CHECK(std::abs(lhs - rhs) <= 1e-8 * scale);
    }
}

TEST_CASE("delta shear and scale law") {
    Rng rng(107);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat2 a = rng.gaussian_mat2(Field::real);
        const Mat2 b = rng.gaussian_mat2(Field::real);
        const cplx x{rng.uniform(-3.0, 3.0), 0.0};
        const cplx y{rng.uniform(-3.0, 3.0), 0.0};
        const cplx lhs = delta_value(a + x * b, y * b);
        const cplx rhs = y * y * delta_value(a, b);
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        CHECK(std::abs(lhs - rhs) <= 1e-9 * scale);
    }
}

TEST_CASE("delta sign is invariant under real actions") {
    Rng rng(108);
    int tested = 0;
    while (tested < 300) {
        const Tensor t = gaussian_tensor(rng, 3, Field::real);
        const SlicePair p = slice_pair(t);
        const DeltaValue dv = delta(p.a, p.b);
        if (std::abs(dv.value) <= 10.0 * dv.tolerance) continue;
        const GLAction g = random_gl_action(rng, 3, Field::real);
        const SlicePair q = slice_pair(gl_action(g, t));
        const DeltaValue dw = delta(q.a, q.b);
        CHECK(dv.is_negative() == dw.is_negative());
        CHECK(dv.is_positive() == dw.is_positive());
        ++tested;
    }
}

TEST_CASE("nonsingular pairs over both fields") {
    CHECK(is_nonsingular_pair(mat_E(), mat_R(), Field::real));
    CHECK_FALSE(is_nonsingular_pair(mat_E(), mat_S(), Field::real));
    CHECK_FALSE(is_nonsingular_pair(mat_E(), mat_R(), Field::complex));
    CHECK_FALSE(is_nonsingular_pair(mat_E(), mat_S(), Field::complex));
    Rng rng(109);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat2 a = rng.gaussian_mat2(Field::complex);
        const Mat2 b = rng.gaussian_mat2(Field::complex);
        CHECK_FALSE(is_nonsingular_pair(a, b, Field::complex));
    }
}

TEST_CASE("pencil polynomial: pure quartic from scaling a fixed pair") {
    const Mat2 d13{1.0, 0.0, 0.0, 3.0};
    const PencilPoly p =
        delta_pencil_poly(Mat2::zero(), Mat2::zero(), mat_E(), d13);
    CHECK(std::abs(p.c[4] - cplx(4)) <= 1e-12);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(p.c[static_cast<std::size_t>(k)]) <= 1e-12);
    }
}

TEST_CASE("pencil polynomial: quadratic coefficient from a corner entry") {
    Rng rng(110);
    const Mat2 s1{1.0, 0.0, 0.0, 0.0};
    for (int trial = 0; trial < 200; ++trial) {
        const Mat2 b1 = rng.gaussian_mat2(Field::real);
        const Mat2 b2 = rng.gaussian_mat2(Field::real);
        const PencilPoly p = delta_pencil_poly(b1, b2, s1, Mat2::zero());
        const cplx corner = b2.at(1, 1);
        CHECK(std::abs(p.c[2] - corner * corner) <= 1e-9);
        CHECK(std::abs(p.c[3]) <= 1e-9);
        CHECK(std::abs(p.c[4]) <= 1e-9);
        CHECK(std::abs(p.c[0] - delta_value(b1, b2)) <= 1e-9);
    }
}

TEST_CASE("pencil polynomial: constant when the direction is zero") {
    Rng rng(111);
    const Mat2 a = rng.gaussian_mat2(Field::complex);
    const Mat2 b = rng.gaussian_mat2(Field::complex);
    const PencilPoly p = delta_pencil_poly(a, b, Mat2::zero(), Mat2::zero());
    CHECK(std::abs(p.c[0] - delta_value(a, b)) <= 1e-12);
    for (int k = 1; k <= 4; ++k) {
        CHECK(std::abs(p.c[static_cast<std::size_t>(k)]) <= 1e-12);
    }
}

TEST_CASE("pencil polynomial interpolates the direct evaluation") {
    Rng rng(112);
    for (int trial = 0; trial < 500; ++trial) {
        const Field f = (trial % 2 == 0) ? Field::real : Field::complex;
        const Mat2 a = rng.gaussian_mat2(f), b = rng.gaussian_mat2(f);
        const Mat2 c = rng.gaussian_mat2(f), d = rng.gaussian_mat2(f);
        const PencilPoly p = delta_pencil_poly(a, b, c, d);
        for (const double node : {-2.0, -1.0, 0.0, 1.0, 2.0, 0.5, -1.7, 3.1}) {
            const cplx direct =
                delta_value(a + cplx(node) * c, b + cplx(node) * d);
            const double scale = std::max(1.0, std::abs(direct));
            CHECK(std::abs(p.eval(cplx(node)) - direct) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("delta profile of the distinguished tensor, identity flattening") {
    const DeltaProfile pr = delta_profile(quad_x(), {1, 2, 3, 4});
    CHECK(pr.d_ab.value == cplx(-4));
    CHECK(pr.d_cd.value == cplx(-16));
    CHECK(pr.d_ac.value == cplx(-8));
    CHECK(pr.d_bd.value == cplx(-8));
    CHECK(pr.d_ab.is_negative());
    CHECK(pr.d_cd.is_negative());
    CHECK(pr.d_ac.is_negative());
    CHECK(pr.d_bd.is_negative());
    // Pencil polynomials evaluate consistently with the stored blocks.
    const cplx at1 = pr.pencil_row.eval(cplx(1.0));
    CHECK(std::abs(at1 - delta_value(pr.a + pr.c, pr.b + pr.d)) <= 1e-9);
    // Three-parameter evaluation at z = 0 reduces to a pure pencil in x, y.
    const cplx v = pr.eval_three_param(cplx(0.5), cplx(-1.0), cplx(0.0));
    const Mat2 first = pr.a + cplx(0.5) * pr.b;
    const Mat2 second = cplx(-1.0) * pr.a + pr.b;
    CHECK(std::abs(v - delta_value(first, second)) <= 1e-12);
}

TEST_CASE("delta profile of the zero tensor vanishes") {
    const QuadTensor zero{};
    for (const auto& perm : essential_flattenings()) {
        const DeltaProfile pr = delta_profile(zero, perm);
        CHECK(pr.d_ab.value == cplx(0));
        CHECK(pr.d_cd.value == cplx(0));
        CHECK(pr.d_ac.value == cplx(0));
        CHECK(pr.d_bd.value == cplx(0));
    }
}
