/**
 * @file linalg.hpp
 * @brief Small fixed-size complex linear algebra: 2-vectors, 2x2 and 4x4
 *        matrices, closed-form 2x2 eigen/SVD kernels.
 *
 * Everything in this library lives in spaces of dimension 2 or 4, so the
 * kernels here are written out directly instead of delegating to a general
 * dense solver.  All storage is std::complex<double>; purely real data is
 * represented with zero imaginary parts and a field tag carried elsewhere.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace htr {

using cplx = std::complex<double>;

/// Scalar field a tensor (or decomposition) is taken over.
enum class Field { real, complex };

[[nodiscard]] inline const char* to_string(Field f) {
    return f == Field::real ? "real" : "complex";
}

// ============================================================================
// 2-vectors
// ============================================================================

using Vec2 = std::array<cplx, 2>;

[[nodiscard]] inline Vec2 operator+(const Vec2& u, const Vec2& v) {
    return {u[0] + v[0], u[1] + v[1]};
}

[[nodiscard]] inline Vec2 operator-(const Vec2& u, const Vec2& v) {
    return {u[0] - v[0], u[1] - v[1]};
}

[[nodiscard]] inline Vec2 operator*(const cplx& s, const Vec2& v) {
    return {s * v[0], s * v[1]};
}

/// Determinant of the 2x2 matrix with columns u, v.
[[nodiscard]] inline cplx det2(const Vec2& u, const Vec2& v) {
    return u[0] * v[1] - u[1] * v[0];
}

[[nodiscard]] inline double norm2(const Vec2& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
}

[[nodiscard]] inline bool is_zero(const Vec2& v) {
    return v[0] == cplx{0.0, 0.0} && v[1] == cplx{0.0, 0.0};
}

// ============================================================================
// 2x2 matrices
// ============================================================================

/// Dense 2x2 complex matrix in row-major storage.
struct Mat2 {
    std::array<cplx, 4> m{};  // row-major: m[2*i + j]

    Mat2() = default;
    Mat2(cplx a, cplx b, cplx c, cplx d) : m{a, b, c, d} {}

    [[nodiscard]] cplx& at(int i, int j) { return m[2 * i + j]; }
    [[nodiscard]] const cplx& at(int i, int j) const { return m[2 * i + j]; }

    [[nodiscard]] static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    [[nodiscard]] static Mat2 zero() { return {}; }

    /// Rank-one matrix u * v^T (columns proportional to u).
    [[nodiscard]] static Mat2 outer(const Vec2& u, const Vec2& v) {
        return {u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]};
    }

    [[nodiscard]] Vec2 col(int j) const { return {at(0, j), at(1, j)}; }
    [[nodiscard]] Vec2 row(int i) const { return {at(i, 0), at(i, 1)}; }

    [[nodiscard]] cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
    [[nodiscard]] cplx trace() const { return m[0] + m[3]; }

    [[nodiscard]] Mat2 transpose() const { return {m[0], m[2], m[1], m[3]}; }

    [[nodiscard]] double frobenius_norm() const {
        return std::sqrt(std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) +
                         std::norm(m[3]));
    }

    [[nodiscard]] bool is_zero() const {
        return m[0] == cplx{} && m[1] == cplx{} && m[2] == cplx{} &&
               m[3] == cplx{};
    }

    /// Largest imaginary magnitude over the four entries.
    [[nodiscard]] double max_imag() const {
        double w = 0.0;
        for (const auto& e : m) w = std::max(w, std::abs(e.imag()));
        return w;
    }

    /// adj(M) with M * adj(M) == det(M) * I.
    [[nodiscard]] Mat2 adjugate() const { return {m[3], -m[1], -m[2], m[0]}; }

    /// Exact 2x2 inverse; throws std::domain_error on a singular matrix.
    [[nodiscard]] Mat2 inverse() const {
        const cplx d = det();
        if (d == cplx{0.0, 0.0}) {
            throw std::domain_error("Mat2::inverse: singular matrix");
        }
        const cplx s = 1.0 / d;
        return {s * m[3], -s * m[1], -s * m[2], s * m[0]};
    }

    Mat2& operator+=(const Mat2& o) {
        for (int i = 0; i < 4; ++i) m[i] += o.m[i];
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        for (int i = 0; i < 4; ++i) m[i] -= o.m[i];
        return *this;
    }
    Mat2& operator*=(const cplx& s) {
        for (auto& e : m) e *= s;
        return *this;
    }
};

[[nodiscard]] inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
[[nodiscard]] inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
[[nodiscard]] inline Mat2 operator*(const cplx& s, Mat2 a) { return a *= s; }

[[nodiscard]] inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r.at(i, j) = a.at(i, 0) * b.at(0, j) + a.at(i, 1) * b.at(1, j);
        }
    }
    return r;
}

[[nodiscard]] inline Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a.at(0, 0) * v[0] + a.at(0, 1) * v[1],
            a.at(1, 0) * v[0] + a.at(1, 1) * v[1]};
}

// ============================================================================
// 4x4 matrices (used by the order-4 unfolding machinery)
// ============================================================================

/// Dense 4x4 matrix over a scalar type (double or cplx), row-major.
template <typename Scalar>
struct Mat4T {
    std::array<Scalar, 16> m{};

    [[nodiscard]] Scalar& at(int i, int j) { return m[4 * i + j]; }
    [[nodiscard]] const Scalar& at(int i, int j) const { return m[4 * i + j]; }

    [[nodiscard]] static Mat4T identity() {
        Mat4T r;
        for (int i = 0; i < 4; ++i) r.at(i, i) = Scalar(1);
        return r;
    }

    [[nodiscard]] double frobenius_norm() const {
        double s = 0.0;
        for (const auto& e : m) s += std::norm(e);
        return std::sqrt(s);
    }
};

template <typename Scalar>
[[nodiscard]] Mat4T<Scalar> operator*(const Mat4T<Scalar>& a,
                                      const Mat4T<Scalar>& b) {
    Mat4T<Scalar> r;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Scalar acc{};
            for (int k = 0; k < 4; ++k) acc += a.at(i, k) * b.at(k, j);
            r.at(i, j) = acc;
        }
    }
    return r;
}

/// LU factorization with partial pivoting, packed for det/solve/inverse.
template <typename Scalar>
struct Lu4 {
    Mat4T<Scalar> lu;
    std::array<int, 4> piv{};
    int sign = 1;
    bool singular = false;

    explicit Lu4(const Mat4T<Scalar>& a) : lu(a) {
        for (int i = 0; i < 4; ++i) piv[i] = i;
        for (int k = 0; k < 4; ++k) {
            int p = k;
            double best = std::abs(lu.at(k, k));
            for (int i = k + 1; i < 4; ++i) {
                const double v = std::abs(lu.at(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (best == 0.0) {
                singular = true;
                continue;
            }
            if (p != k) {
                for (int j = 0; j < 4; ++j) std::swap(lu.at(p, j), lu.at(k, j));
                std::swap(piv[p], piv[k]);
                sign = -sign;
            }
            for (int i = k + 1; i < 4; ++i) {
                lu.at(i, k) /= lu.at(k, k);
                for (int j = k + 1; j < 4; ++j) {
                    lu.at(i, j) -= lu.at(i, k) * lu.at(k, j);
                }
            }
        }
    }

    [[nodiscard]] Scalar det() const {
        Scalar d = Scalar(sign);
        for (int i = 0; i < 4; ++i) d *= lu.at(i, i);
        return d;
    }

    /// Solves A x = b; only valid when !singular.
    [[nodiscard]] std::array<Scalar, 4> solve(
        const std::array<Scalar, 4>& b) const {
        std::array<Scalar, 4> x{};
        for (int i = 0; i < 4; ++i) x[i] = b[piv[i]];
        for (int i = 1; i < 4; ++i) {
            for (int j = 0; j < i; ++j) x[i] -= lu.at(i, j) * x[j];
        }
        for (int i = 3; i >= 0; --i) {
            for (int j = i + 1; j < 4; ++j) x[i] -= lu.at(i, j) * x[j];
            x[i] /= lu.at(i, i);
        }
        return x;
    }

    [[nodiscard]] Mat4T<Scalar> inverse() const {
        Mat4T<Scalar> r;
        for (int j = 0; j < 4; ++j) {
            std::array<Scalar, 4> e{};
            e[j] = Scalar(1);
            const auto x = solve(e);
            for (int i = 0; i < 4; ++i) r.at(i, j) = x[i];
        }
        return r;
    }
};

template <typename Scalar>
[[nodiscard]] Scalar det4(const Mat4T<Scalar>& a) {
    Lu4<Scalar> f(a);
    return f.singular ? Scalar(0) : f.det();
}

using Mat4 = Mat4T<double>;
using Mat4c = Mat4T<cplx>;

// ============================================================================
// Closed-form 2x2 spectral kernels
// ============================================================================

/// Eigenvalues of a 2x2 complex matrix via the quadratic formula.
/// Roots of x^2 - tr(W) x + det(W); the returned pair is ordered so that
/// the root of larger magnitude comes first.
[[nodiscard]] inline std::array<cplx, 2> eigenvalues2(const Mat2& w) {
    const cplx tr = w.trace();
    const cplx disc = tr * tr - 4.0 * w.det();
    const cplx root = std::sqrt(disc);  // principal branch
    cplx l1 = 0.5 * (tr + root);
    cplx l2 = 0.5 * (tr - root);
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
    return {l1, l2};
}

/// A (right) eigenvector of W for eigenvalue lambda.  Picks the larger of
/// the two candidate null-space reads of W - lambda I for stability; for a
/// (numerically) scalar matrix returns the requested basis fallback.
[[nodiscard]] inline Vec2 eigenvector2(const Mat2& w, const cplx& lambda,
                                       const Vec2& fallback = {1.0, 0.0}) {
    const Mat2 s{w.at(0, 0) - lambda, w.at(0, 1), w.at(1, 0),
                 w.at(1, 1) - lambda};
    // Rows of (W - lambda I) annihilate the eigenvector; a row (p, q) != 0
    // yields the eigenvector (-q, p)... using the orthogonal-complement read
    // per row maximizes the usable pivot.
    const Vec2 r0{s.at(0, 0), s.at(0, 1)};
    const Vec2 r1{s.at(1, 0), s.at(1, 1)};
    const double n0 = norm2(r0);
    const double n1 = norm2(r1);
    if (n0 == 0.0 && n1 == 0.0) return fallback;
    const Vec2& r = (n0 >= n1) ? r0 : r1;
    Vec2 v{-r[1], r[0]};
    const double nv = norm2(v);
    return {v[0] / nv, v[1] / nv};
}

/// Singular values of a 2x2 complex matrix, sigma1 >= sigma2 >= 0.
[[nodiscard]] inline std::array<double, 2> singular_values2(const Mat2& a) {
    // Gram matrix A^H A is Hermitian 2x2; its eigenvalues are available in
    // closed form and their square roots are the singular values.
    const double g00 = std::norm(a.m[0]) + std::norm(a.m[2]);
    const double g11 = std::norm(a.m[1]) + std::norm(a.m[3]);
    const cplx g01 = std::conj(a.m[0]) * a.m[1] + std::conj(a.m[2]) * a.m[3];
    const double mid = 0.5 * (g00 + g11);
    const double off = std::norm(g01);
    const double d = std::sqrt(std::max(0.25 * (g00 - g11) * (g00 - g11) + off,
                                        0.0));
    const double l1 = std::max(mid + d, 0.0);
    const double l2 = std::max(mid - d, 0.0);
    return {std::sqrt(l1), std::sqrt(l2)};
}

/// Best rank-one approximation of a 2x2 complex matrix (dominant SVD pair),
/// returned as factors u, v with A ~ u * v^T.  For the zero matrix both
/// factors are zero.
[[nodiscard]] inline std::pair<Vec2, Vec2> dominant_rank_one2(const Mat2& a) {
    if (a.is_zero()) return {Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
    // Dominant eigenvector of the Gram matrix gives the right factor.
    const double g00 = std::norm(a.m[0]) + std::norm(a.m[2]);
    const double g11 = std::norm(a.m[1]) + std::norm(a.m[3]);
    const cplx g01 = std::conj(a.m[0]) * a.m[1] + std::conj(a.m[2]) * a.m[3];
    const Mat2 gram{g00, g01, std::conj(g01), g11};
    const auto ev = eigenvalues2(gram);
    // v is the dominant right singular vector (unit norm); the best
    // rank-one approximation is (A v) v^H, i.e. factors (A v, conj(v))
    // under the plain outer product u v^T.
    Vec2 v = eigenvector2(gram, ev[0], {1.0, 0.0});
    Vec2 u = a * v;
    if (norm2(u) == 0.0) {
        // Degenerate Gram read (e.g. extreme scales); fall back to the
        // other eigenvector.
        v = eigenvector2(gram, ev[1], {0.0, 1.0});
        u = a * v;
    }
    return {u, {std::conj(v[0]), std::conj(v[1])}};
}

/// Frobenius distance ||A - u v^T||_F.
[[nodiscard]] inline double rank_one_residual2(const Mat2& a, const Vec2& u,
                                               const Vec2& v) {
    return (a - Mat2::outer(u, v)).frobenius_norm();
}

/// Factors an (exactly or numerically) rank-one nonzero matrix as u v^T via
/// its largest entry; exact for integer matrices.
[[nodiscard]] inline std::pair<Vec2, Vec2> rank_one_factors2(const Mat2& a) {
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double v = std::abs(a.at(i, j));
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    const cplx pivot = a.at(bi, bj);
    if (pivot == cplx{0.0, 0.0}) {
        throw std::domain_error("rank_one_factors2: zero matrix");
    }
    const Vec2 u{a.at(0, bj) / pivot, a.at(1, bj) / pivot};
    const Vec2 v{a.at(bi, 0), a.at(bi, 1)};
    return {u, v};
}

}  // namespace htr
