/**
 * @file tensor.cpp
 * @brief Tensor conversions, rank-one assembly, group actions, and mode
 *        reordering.
 */
#include "htr/tensor.hpp"

#include <algorithm>

namespace htr {

// ============================================================================
// Order-3 / order-4 views
// ============================================================================

Tensor to_tensor(const SlicePair& p, Field field) {
    Tensor t(3, field);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            t.at(i, j, 0) = p.a.at(i, j);
            t.at(i, j, 1) = p.b.at(i, j);
        }
    }
    return t;
}

SlicePair slice_pair(const Tensor& t) {
    if (t.order() != 3) {
        throw std::invalid_argument("slice_pair: tensor must have order 3");
    }
    SlicePair p;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            p.a.at(i, j) = t.at(i, j, 0);
            p.b.at(i, j) = t.at(i, j, 1);
        }
    }
    return p;
}

Tensor to_tensor(const QuadTensor& q, Field field) {
    Tensor t(4, field);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    t.at(i, j, k, l) = q.block(k, l).at(i, j);
                }
            }
        }
    }
    return t;
}

QuadTensor quad_tensor(const Tensor& t) {
    if (t.order() != 4) {
        throw std::invalid_argument("quad_tensor: tensor must have order 4");
    }
    QuadTensor q;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    q.block(k, l).at(i, j) = t.at(i, j, k, l);
                }
            }
        }
    }
    return q;
}

Tensor leading_block(const Tensor& t, int s, const std::vector<int>& trailing) {
    const int n = t.order();
    if (s < 1 || s > n) {
        throw std::invalid_argument("leading_block: invalid block order");
    }
    if (static_cast<int>(trailing.size()) != n - s) {
        throw std::invalid_argument("leading_block: trailing arity mismatch");
    }
    Tensor b(s, t.field());
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::copy(trailing.begin(), trailing.end(),
              idx.begin() + s);
    std::vector<int> lead(static_cast<std::size_t>(s));
    const std::size_t count = std::size_t{1} << s;
    for (std::size_t code = 0; code < count; ++code) {
        for (int u = 0; u < s; ++u) {
            lead[static_cast<std::size_t>(u)] =
                static_cast<int>((code >> (s - 1 - u)) & 1U);
            idx[static_cast<std::size_t>(u)] = lead[static_cast<std::size_t>(u)];
        }
        b.at(lead) = t.at(idx);
    }
    return b;
}

// ============================================================================
// Rank-one terms and decompositions
// ============================================================================

Tensor rank_one(const RankOneTerm& term, Field field) {
    const int n = term.order();
    Tensor t(n, field);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t off = 0; off < t.size(); ++off) {
        cplx prod{1.0, 0.0};
        for (int m = 0; m < n; ++m) {
            const int i = static_cast<int>((off >> (n - 1 - m)) & 1U);
            prod *= term.factors[static_cast<std::size_t>(m)]
                                [static_cast<std::size_t>(i)];
        }
        t.data()[off] = prod;
    }
    return t;
}

Tensor Decomposition::reconstruct() const {
    Tensor t(order, field);
    for (const auto& term : terms) {
        if (term.order() != order) {
            throw std::invalid_argument(
                "Decomposition::reconstruct: term order mismatch");
        }
        t += rank_one(term, field);
    }
    return t;
}

double residual(const Tensor& target, const Decomposition& d) {
    if (d.order != target.order()) {
        throw std::invalid_argument("residual: order mismatch");
    }
    return (target - d.reconstruct()).frobenius_norm();
}

// ============================================================================
// Group action
// ============================================================================

GLAction::GLAction(std::vector<Mat2> mats) : mats_(std::move(mats)) {
    if (mats_.empty()) {
        throw std::invalid_argument("GLAction: empty matrix tuple");
    }
    for (const auto& g : mats_) {
        const double nf = g.frobenius_norm();
        if (std::abs(g.det()) <= kDetTol * nf * nf) {
            throw std::invalid_argument(
                "GLAction: matrix is singular or nearly singular");
        }
    }
}

GLAction GLAction::inverse() const {
    std::vector<Mat2> inv;
    inv.reserve(mats_.size());
    for (const auto& g : mats_) inv.push_back(g.inverse());
    return GLAction(std::move(inv));
}

Tensor gl_action(const GLAction& g, const Tensor& t) {
    if (g.order() != t.order()) {
        throw std::invalid_argument("gl_action: order mismatch");
    }
    const int n = t.order();
    Tensor r = t;
    for (int mode = 0; mode < n; ++mode) {
        const Mat2& m = g.mat(mode);
        const std::size_t stride = std::size_t{1} << (n - 1 - mode);
        for (std::size_t base = 0; base < r.size(); ++base) {
            if ((base & stride) != 0) continue;
            const cplx x0 = r.data()[base];
            const cplx x1 = r.data()[base | stride];
            r.data()[base] = m.at(0, 0) * x0 + m.at(0, 1) * x1;
            r.data()[base | stride] = m.at(1, 0) * x0 + m.at(1, 1) * x1;
        }
    }
    return r;
}

RankOneTerm gl_action(const GLAction& g, const RankOneTerm& term) {
    if (g.order() != term.order()) {
        throw std::invalid_argument("gl_action: order mismatch");
    }
    std::vector<Vec2> fs;
    fs.reserve(term.factors.size());
    for (int mode = 0; mode < term.order(); ++mode) {
        fs.push_back(g.mat(mode) * term.factors[static_cast<std::size_t>(mode)]);
    }
    return RankOneTerm(std::move(fs));
}

Decomposition gl_action(const GLAction& g, const Decomposition& d) {
    Decomposition r;
    r.field = d.field;
    r.order = d.order;
    r.terms.reserve(d.terms.size());
    for (const auto& term : d.terms) r.terms.push_back(gl_action(g, term));
    return r;
}

// ============================================================================
// Mode reordering and flattenings
// ============================================================================

Tensor reorder_modes(const Tensor& t, const std::vector<int>& perm) {
    const int n = t.order();
    if (static_cast<int>(perm.size()) != n) {
        throw std::invalid_argument("reorder_modes: permutation arity");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const int p : perm) {
        if (p < 1 || p > n || seen[static_cast<std::size_t>(p - 1)]) {
            throw std::invalid_argument("reorder_modes: not a permutation");
        }
        seen[static_cast<std::size_t>(p - 1)] = true;
    }
    Tensor r(n, t.field());
    std::vector<int> in_idx(static_cast<std::size_t>(n));
    std::vector<int> out_idx(static_cast<std::size_t>(n));
    for (std::size_t off = 0; off < t.size(); ++off) {
        for (int m = 0; m < n; ++m) {
            in_idx[static_cast<std::size_t>(m)] =
                static_cast<int>((off >> (n - 1 - m)) & 1U);
        }
        for (int s = 0; s < n; ++s) {
            out_idx[static_cast<std::size_t>(s)] =
                in_idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(
                    s)] - 1)];
        }
        r.at(out_idx) = t.data()[off];
    }
    return r;
}

std::array<std::array<int, 4>, 6> essential_flattenings() {
    return {{{1, 2, 3, 4},
             {3, 2, 1, 4},
             {1, 3, 2, 4},
             {1, 4, 3, 2},
             {3, 4, 1, 2},
             {4, 1, 3, 2}}};
}

bool equivalent_flattenings(const std::array<int, 4>& p,
                            const std::array<int, 4>& q) {
    // The slice analysis is unchanged when the two slice modes swap roles
    // and/or the two pencil modes swap roles; on permutation values this is
    // the relabeling 1<->2 and/or 3<->4.
    for (int swap_a = 0; swap_a < 2; ++swap_a) {
        for (int swap_b = 0; swap_b < 2; ++swap_b) {
            bool same = true;
            for (int s = 0; s < 4; ++s) {
                int v = p[static_cast<std::size_t>(s)];
                if (swap_a == 1) {
                    if (v == 1) {
                        v = 2;
                    } else if (v == 2) {
                        v = 1;
                    }
                }
                if (swap_b == 1) {
                    if (v == 3) {
                        v = 4;
                    } else if (v == 4) {
                        v = 3;
                    }
                }
                if (v != q[static_cast<std::size_t>(s)]) {
                    same = false;
                    break;
                }
            }
            if (same) return true;
        }
    }
    return false;
}

// ============================================================================
// Order-4 unfolding
// ============================================================================

Mat4c quad_unfolding_matrix(const QuadTensor& q) {
    Mat4c b;
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            const auto column = vec2x2(q.block(k, l));
            for (int r = 0; r < 4; ++r) b.at(r, l + 2 * k) = column[r];
        }
    }
    return b;
}

Mat4c quad_unfolding_matrix(const Tensor& t) {
    return quad_unfolding_matrix(quad_tensor(t));
}

}  // namespace htr
