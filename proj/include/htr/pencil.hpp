/**
 * @file pencil.hpp
 * @brief The degree-4 slice-pair invariant Delta (Cayley hyperdeterminant
 *        up to sign), the auxiliary form Theta, the symmetric dot form
 *        A.B, nonsingular-pair tests, and polynomials of Delta along
 *        matrix pencils.
 */
#pragma once

#include <array>

#include "htr/linalg.hpp"
#include "htr/tensor.hpp"

namespace htr {

// ============================================================================
// Scalar invariants
// ============================================================================

/// Sign-classification tolerance for Delta: Delta is homogeneous of degree
/// 4 in the pair, so the tolerance scales quartically with the data.
[[nodiscard]] inline double delta_tolerance(const Mat2& a, const Mat2& b) {
    const double s = a.frobenius_norm() + b.frobenius_norm();
    return 1e-9 * s * s * s * s;
}

/// Delta with its scale-aware sign classification.  For real pairs the
/// is_negative / is_positive reads give the sign decision; for complex
/// pairs only is_zero / is_nonzero are meaningful.
struct DeltaValue {
    cplx value{};
    double tolerance = 0.0;

    [[nodiscard]] bool is_zero() const {
        return std::abs(value) <= tolerance;
    }
    [[nodiscard]] bool is_nonzero() const { return !is_zero(); }
    [[nodiscard]] bool is_negative() const {
        return value.real() < -tolerance;
    }
    [[nodiscard]] bool is_positive() const {
        return value.real() > tolerance;
    }
};

/// Raw Delta kernel via the column form
///   (det(a1,b2) + det(b1,a2))^2 - 4 det(a1,a2) det(b1,b2),
/// where a_k, b_k are the columns of A and B.
[[nodiscard]] cplx delta_value(const Mat2& a, const Mat2& b);

[[nodiscard]] DeltaValue delta(const Mat2& a, const Mat2& b);
[[nodiscard]] DeltaValue delta(const SlicePair& p);

/// Theta((a1,a2);(b1,b2)) = det(a1,b1) + det(a2,b2) on columns.
[[nodiscard]] cplx theta(const Mat2& a, const Mat2& b);

/// Tolerance for deciding Theta != 0 (degree-2 homogeneous).
[[nodiscard]] inline double theta_tolerance(const Mat2& a, const Mat2& b) {
    const double s = a.frobenius_norm() + b.frobenius_norm();
    return 1e-9 * s * s;
}

/// Symmetric dot form A.B = det(A+B) - det(A) - det(B); the discriminant
/// identity Delta = (A.B)^2 - 4 det(A) det(B) links it to delta_value.
[[nodiscard]] cplx dot(const Mat2& a, const Mat2& b);

/// Whether the quadratic det(A) x^2 - (A.B) x + det(B) has no root in the
/// field and det(A) != 0.  Over the complex numbers this is always false;
/// over the reals it amounts to det(A) != 0 and Delta(A;B) < 0.
[[nodiscard]] bool is_nonsingular_pair(const Mat2& a, const Mat2& b,
                                       Field field);

// ============================================================================
// Pencil polynomials
// ============================================================================

/// A polynomial of degree <= 4 in one variable, as produced by restricting
/// Delta to a matrix pencil.
struct PencilPoly {
    std::array<cplx, 5> c{};  // c[k] multiplies x^k

    [[nodiscard]] cplx eval(const cplx& x) const {
        return ((((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x) + c[0];
    }

    /// Degree with coefficients below `tol` treated as zero.
    [[nodiscard]] int degree(double tol = 0.0) const {
        for (int k = 4; k >= 1; --k) {
            if (std::abs(c[static_cast<std::size_t>(k)]) > tol) return k;
        }
        return 0;
    }
};

/// Coefficients of x -> Delta(A + xC; B + xD), recovered exactly (for the
/// true degree <= 4) by interpolation at x in {-2, -1, 0, 1, 2}.
[[nodiscard]] PencilPoly delta_pencil_poly(const Mat2& a, const Mat2& b,
                                           const Mat2& c, const Mat2& d);

// ============================================================================
// Slice profile of an order-4 tensor under one flattening
// ============================================================================

/// The four Delta values and two pencil polynomials attached to the block
/// array (A, B; C, D) = (T11, T12; T21, T22) of a flattened order-4
/// tensor, plus point evaluation of the three-parameter combination
/// Delta(A + xB + z(C + xD); yA + B + z(yC + D)).
struct DeltaProfile {
    DeltaValue d_ab;  // Delta(A;B)
    DeltaValue d_cd;  // Delta(C;D)
    DeltaValue d_ac;  // Delta(A;C)
    DeltaValue d_bd;  // Delta(B;D)
    PencilPoly pencil_row;    // x -> Delta(A+xC; B+xD)
    PencilPoly pencil_col;    // x -> Delta(A+xB; C+xD)
    Mat2 a, b, c, d;          // retained blocks for point evaluations

    [[nodiscard]] cplx eval_three_param(const cplx& x, const cplx& y,
                                        const cplx& z) const;
};

/// Profile of the tensor flattened by `perm` (any permutation accepted;
/// the six in essential_flattenings() cover the distinct cases).
[[nodiscard]] DeltaProfile delta_profile(const QuadTensor& q,
                                         const std::array<int, 4>& perm);

}  // namespace htr
