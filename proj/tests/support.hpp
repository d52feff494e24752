/**
 * @file support.hpp
 * @brief Shared helpers for the unit-test suite: random draws and a few
 *        slow-but-independent oracles the fast library paths are checked
 *        against.
 */
#pragma once

#include <array>
#include <complex>

#include "htr/rng.hpp"
#include "htr/tensor.hpp"

namespace htr::testing {

[[nodiscard]] inline Tensor gaussian_tensor(Rng& rng, int order, Field field) {
    Tensor t(order, field);
    for (auto& e : t.data()) e = rng.gaussian_scalar(field);
    return t;
}

[[nodiscard]] inline Mat2 random_invertible_mat2(Rng& rng, Field field,
                                                 double min_abs_det = 0.1) {
    for (;;) {
        Mat2 g = rng.gaussian_mat2(field);
        if (std::abs(g.det()) >= min_abs_det) return g;
    }
}

[[nodiscard]] inline GLAction random_gl_action(Rng& rng, int order,
                                               Field field) {
    std::vector<Mat2> mats;
    mats.reserve(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        mats.push_back(random_invertible_mat2(rng, field));
    }
    return GLAction(std::move(mats));
}

/// Independent 4x4 determinant via cofactor expansion along the first row
/// (recursive 3x3 minors written out), used as an oracle against the
/// library's elimination-based determinant.
[[nodiscard]] inline cplx cofactor_det4(const Mat4c& a) {
    const auto m3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return a.at(r0, c0) * (a.at(r1, c1) * a.at(r2, c2) -
                               a.at(r1, c2) * a.at(r2, c1)) -
               a.at(r0, c1) * (a.at(r1, c0) * a.at(r2, c2) -
                               a.at(r1, c2) * a.at(r2, c0)) +
               a.at(r0, c2) * (a.at(r1, c0) * a.at(r2, c1) -
                               a.at(r1, c1) * a.at(r2, c0));
    };
    return a.at(0, 0) * m3(1, 2, 3, 1, 2, 3) - a.at(0, 1) * m3(1, 2, 3, 0, 2, 3) +
           a.at(0, 2) * m3(1, 2, 3, 0, 1, 3) - a.at(0, 3) * m3(1, 2, 3, 0, 1, 2);
}

/// Distinguished 2x2 matrices used across the suites.
[[nodiscard]] inline Mat2 mat_E() { return {1.0, 0.0, 0.0, 1.0}; }
[[nodiscard]] inline Mat2 mat_S() { return {0.0, 1.0, 0.0, 0.0}; }
[[nodiscard]] inline Mat2 mat_R() { return {0.0, 1.0, -1.0, 0.0}; }

/// The distinguished integer order-4 tensor whose block array is
/// (E, [[0,-1],[1,0]]; [[0,2],[-1,0]], diag(1,2)); its unfolding matrix has
/// determinant 1 and every flattening keeps all slice pairs at rank 3.
/// Test-local copy, independent of the library constant.
[[nodiscard]] inline QuadTensor quad_x() {
    QuadTensor q;
    q.block(0, 0) = mat_E();
    q.block(0, 1) = Mat2{0.0, -1.0, 1.0, 0.0};
    q.block(1, 0) = Mat2{0.0, 2.0, -1.0, 0.0};
    q.block(1, 1) = Mat2{1.0, 0.0, 0.0, 2.0};
    return q;
}

}  // namespace htr::testing
