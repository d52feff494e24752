/**
 * @file pencil.cpp
 * @brief Delta / Theta / dot kernels and pencil polynomial extraction.
 */
#include "htr/pencil.hpp"

namespace htr {

cplx delta_value(const Mat2& a, const Mat2& b) {
    const Vec2 a1 = a.col(0), a2 = a.col(1);
    const Vec2 b1 = b.col(0), b2 = b.col(1);
    const cplx mixed = det2(a1, b2) + det2(b1, a2);
    return mixed * mixed - 4.0 * det2(a1, a2) * det2(b1, b2);
}

DeltaValue delta(const Mat2& a, const Mat2& b) {
    return {delta_value(a, b), delta_tolerance(a, b)};
}

DeltaValue delta(const SlicePair& p) { return delta(p.a, p.b); }

cplx theta(const Mat2& a, const Mat2& b) {
    return det2(a.col(0), b.col(0)) + det2(a.col(1), b.col(1));
}

cplx dot(const Mat2& a, const Mat2& b) {
    return (a + b).det() - a.det() - b.det();
}

bool is_nonsingular_pair(const Mat2& a, const Mat2& b, Field field) {
    if (field == Field::complex) {
        // Every nonconstant polynomial has a complex root, and a singular
        // leading slice fails the definition outright.
        return false;
    }
    const double na = a.frobenius_norm();
    if (std::abs(a.det()) <= 1e-12 * na * na) return false;
    // No real root iff the discriminant (A.B)^2 - 4 det(A) det(B) is
    // negative; note this is a different evaluation path than delta_value.
    const cplx disc = dot(a, b) * dot(a, b) - 4.0 * a.det() * b.det();
    return disc.real() < -delta_tolerance(a, b);
}

PencilPoly delta_pencil_poly(const Mat2& a, const Mat2& b, const Mat2& c,
                             const Mat2& d) {
    // Sample at the five nodes -2, -1, 0, 1, 2 and invert the symmetric
    // Vandermonde system in closed form (exact for degree <= 4).
    const auto sample = [&](double x) {
        return delta_value(a + cplx(x) * c, b + cplx(x) * d);
    };
    const cplx vm2 = sample(-2.0), vm1 = sample(-1.0), v0 = sample(0.0),
               vp1 = sample(1.0), vp2 = sample(2.0);
    const cplx e1 = 0.5 * (vp1 + vm1);  // even part at 1
    const cplx e2 = 0.5 * (vp2 + vm2);  // even part at 2
    const cplx o1 = 0.5 * (vp1 - vm1);  // odd part at 1
    const cplx o2 = 0.5 * (vp2 - vm2);  // odd part at 2
    PencilPoly p;
    p.c[0] = v0;
    p.c[4] = (e2 - 4.0 * e1 + 3.0 * v0) / 12.0;
    p.c[2] = e1 - v0 - p.c[4];
    p.c[3] = (o2 - 2.0 * o1) / 6.0;
    p.c[1] = o1 - p.c[3];
    return p;
}

cplx DeltaProfile::eval_three_param(const cplx& x, const cplx& y,
                                    const cplx& z) const {
    const Mat2 first = a + x * b + z * (c + x * d);
    const Mat2 second = y * a + b + z * (y * c + d);
    return delta_value(first, second);
}

DeltaProfile delta_profile(const QuadTensor& q, const std::array<int, 4>& perm) {
    const Tensor flat = reorder_modes(
        to_tensor(q, Field::complex),
        std::vector<int>(perm.begin(), perm.end()));
    const QuadTensor f = quad_tensor(flat);
    DeltaProfile r;
    r.a = f.block(0, 0);
    r.b = f.block(0, 1);
    r.c = f.block(1, 0);
    r.d = f.block(1, 1);
    r.d_ab = delta(r.a, r.b);
    r.d_cd = delta(r.c, r.d);
    r.d_ac = delta(r.a, r.c);
    r.d_bd = delta(r.b, r.d);
    r.pencil_row = delta_pencil_poly(r.a, r.b, r.c, r.d);
    r.pencil_col = delta_pencil_poly(r.a, r.c, r.b, r.d);
    return r;
}

}  // namespace htr
