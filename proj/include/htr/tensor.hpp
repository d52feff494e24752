/**
 * @file tensor.hpp
 * @brief Dense tensors with every mode of dimension 2, rank-one terms and
 *        decompositions, per-mode group actions, mode reordering, and the
 *        order-4 unfolding used by the certification machinery.
 *
 * Storage convention: an order-n tensor is a flat array of 2^n complex
 * entries; the entry at (0-based) multi-index (i_1, ..., i_n) lives at flat
 * offset sum_t i_t * 2^(n-t-1), i.e. the first mode is the most significant
 * "digit".  Real tensors use the same storage with zero imaginary parts and
 * are distinguished by a field tag.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "htr/linalg.hpp"

namespace htr {

// ============================================================================
// Tensor
// ============================================================================

/// Dense complex tensor of shape 2 x 2 x ... x 2 (order() factors).
class Tensor {
public:
    Tensor(int order, Field field)
        : order_(order), field_(field), data_(std::size_t{1} << order) {
        if (order < 1 || order > 30) {
            throw std::invalid_argument("Tensor: order out of range");
        }
    }

    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] Field field() const { return field_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    [[nodiscard]] std::vector<cplx>& data() { return data_; }
    [[nodiscard]] const std::vector<cplx>& data() const { return data_; }

    /// Flat offset of a 0-based multi-index (first mode most significant).
    [[nodiscard]] std::size_t flat_index(const std::vector<int>& idx) const {
        if (static_cast<int>(idx.size()) != order_) {
            throw std::invalid_argument("Tensor: index arity mismatch");
        }
        std::size_t off = 0;
        for (int t = 0; t < order_; ++t) {
            const int i = idx[static_cast<std::size_t>(t)];
            if (i < 0 || i > 1) {
                throw std::invalid_argument("Tensor: index out of range");
            }
            off = (off << 1) | static_cast<std::size_t>(i);
        }
        return off;
    }

    [[nodiscard]] cplx& at(const std::vector<int>& idx) {
        return data_[flat_index(idx)];
    }
    [[nodiscard]] const cplx& at(const std::vector<int>& idx) const {
        return data_[flat_index(idx)];
    }

    /// Convenience accessor: t.at(i, j, k, ...), one 0/1 index per mode.
    template <typename... Is>
    [[nodiscard]] cplx& at(Is... is) {
        static_assert((std::is_convertible_v<Is, int> && ...));
        return at(std::vector<int>{static_cast<int>(is)...});
    }
    template <typename... Is>
    [[nodiscard]] const cplx& at(Is... is) const {
        static_assert((std::is_convertible_v<Is, int> && ...));
        return at(std::vector<int>{static_cast<int>(is)...});
    }

    [[nodiscard]] double frobenius_norm() const {
        double s = 0.0;
        for (const auto& e : data_) s += std::norm(e);
        return std::sqrt(s);
    }

    [[nodiscard]] double max_imag() const {
        double w = 0.0;
        for (const auto& e : data_) w = std::max(w, std::abs(e.imag()));
        return w;
    }

    [[nodiscard]] bool is_zero() const {
        for (const auto& e : data_) {
            if (e != cplx{0.0, 0.0}) return false;
        }
        return true;
    }

    /// Same data viewed over the other field tag (no entry change).
    [[nodiscard]] Tensor with_field(Field f) const {
        Tensor r = *this;
        r.field_ = f;
        return r;
    }

    Tensor& operator+=(const Tensor& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Tensor& operator*=(const cplx& s) {
        for (auto& e : data_) e *= s;
        return *this;
    }

private:
    void check_same_shape(const Tensor& o) const {
        if (order_ != o.order_) {
            throw std::invalid_argument("Tensor: order mismatch");
        }
    }

    int order_;
    Field field_;
    std::vector<cplx> data_;
};

[[nodiscard]] inline Tensor operator+(Tensor a, const Tensor& b) {
    return a += b;
}
[[nodiscard]] inline Tensor operator-(Tensor a, const Tensor& b) {
    return a -= b;
}
[[nodiscard]] inline Tensor operator*(const cplx& s, Tensor a) {
    return a *= s;
}

// ============================================================================
// Order-3 and order-4 views
// ============================================================================

/// An order-3 tensor viewed as a pair of 2x2 slices (A; B): the third-mode
/// index selects the slice, so t_{ijk} = A_{ij} for k = 0 and B_{ij} for
/// k = 1 (0-based).
struct SlicePair {
    Mat2 a;
    Mat2 b;

    [[nodiscard]] double norm_sum() const {
        return a.frobenius_norm() + b.frobenius_norm();
    }
};

[[nodiscard]] Tensor to_tensor(const SlicePair& p, Field field);
[[nodiscard]] SlicePair slice_pair(const Tensor& t);

/// An order-4 tensor viewed as a 2x2 array of 2x2 blocks: block (k, l)
/// holds the entries t_{ijkl} with the third- and fourth-mode indices
/// fixed at (k, l) (0-based).
struct QuadTensor {
    std::array<Mat2, 4> blocks{};  // blocks[2*k + l]

    [[nodiscard]] Mat2& block(int k, int l) { return blocks[2 * k + l]; }
    [[nodiscard]] const Mat2& block(int k, int l) const {
        return blocks[2 * k + l];
    }

    /// Slice pair along the fourth mode with the third-mode index at 0:
    /// (T_00; T_01).
    [[nodiscard]] SlicePair first_half() const {
        return {block(0, 0), block(0, 1)};
    }
    /// Slice pair along the fourth mode with the third-mode index at 1.
    [[nodiscard]] SlicePair second_half() const {
        return {block(1, 0), block(1, 1)};
    }
};

[[nodiscard]] Tensor to_tensor(const QuadTensor& q, Field field);
[[nodiscard]] QuadTensor quad_tensor(const Tensor& t);

/// Order-s tensor obtained by fixing modes s+1..n at the given 0-based
/// trailing indices and keeping modes 1..s.
[[nodiscard]] Tensor leading_block(const Tensor& t, int s,
                                   const std::vector<int>& trailing);

// ============================================================================
// Rank-one terms and decompositions
// ============================================================================

/// A single rank-one term v_1 (x) v_2 (x) ... (x) v_n.  No factor may be
/// the zero vector.
struct RankOneTerm {
    std::vector<Vec2> factors;

    RankOneTerm() = default;
    explicit RankOneTerm(std::vector<Vec2> fs) : factors(std::move(fs)) {
        for (const auto& v : factors) {
            if (is_zero(v)) {
                throw std::invalid_argument(
                    "RankOneTerm: zero factor vector");
            }
        }
    }

    [[nodiscard]] int order() const {
        return static_cast<int>(factors.size());
    }
};

/// Dense tensor of a single rank-one term.
[[nodiscard]] Tensor rank_one(const RankOneTerm& term, Field field);

/// A sum of rank-one terms claimed to equal some target tensor.
struct Decomposition {
    Field field = Field::real;
    int order = 0;
    std::vector<RankOneTerm> terms;

    [[nodiscard]] int rank_bound() const {
        return static_cast<int>(terms.size());
    }

    [[nodiscard]] Tensor reconstruct() const;
};

/// Frobenius norm of (target - reconstruction).
[[nodiscard]] double residual(const Tensor& target, const Decomposition& d);

// ============================================================================
// Per-mode group action
// ============================================================================

/// A tuple of invertible 2x2 matrices, one per mode, acting on tensors by
/// multiplying each mode: (g . T)_{j_1..j_n} = sum (g_1)_{j_1 i_1} ...
/// (g_n)_{j_n i_n} T_{i_1..i_n}.  Construction rejects matrices whose
/// determinant is negligible against the squared Frobenius norm.
class GLAction {
public:
    explicit GLAction(std::vector<Mat2> mats);

    [[nodiscard]] int order() const { return static_cast<int>(mats_.size()); }
    [[nodiscard]] const Mat2& mat(int mode) const {
        return mats_[static_cast<std::size_t>(mode)];
    }
    [[nodiscard]] const std::vector<Mat2>& mats() const { return mats_; }

    /// Action with every matrix replaced by its inverse.
    [[nodiscard]] GLAction inverse() const;

    static constexpr double kDetTol = 1e-12;

private:
    std::vector<Mat2> mats_;
};

[[nodiscard]] Tensor gl_action(const GLAction& g, const Tensor& t);
[[nodiscard]] RankOneTerm gl_action(const GLAction& g, const RankOneTerm& term);
[[nodiscard]] Decomposition gl_action(const GLAction& g,
                                      const Decomposition& d);

// ============================================================================
// Mode reordering and the essential order-4 flattenings
// ============================================================================

/// Permutes the modes of a tensor.  `perm` is 1-based of length order();
/// output mode s carries input mode perm[s]: the entry of the result at
/// (i_{perm(1)}, ..., i_{perm(n)}) equals the entry of the input at
/// (i_1, ..., i_n).
[[nodiscard]] Tensor reorder_modes(const Tensor& t,
                                   const std::vector<int>& perm);

/// The six mode permutations of an order-4 tensor that exhaust all ways of
/// splitting the four modes into slice modes and pencil modes, up to the
/// symmetries that leave the slice analysis unchanged (swapping the two
/// slice modes and/or the two pencil modes).  Returned as 1-based arguments
/// for reorder_modes.
[[nodiscard]] std::array<std::array<int, 4>, 6> essential_flattenings();

/// Whether two order-4 mode permutations induce the same slice analysis,
/// i.e. agree up to swapping values 1<->2 and/or 3<->4.
[[nodiscard]] bool equivalent_flattenings(const std::array<int, 4>& p,
                                          const std::array<int, 4>& q);

// ============================================================================
// Column-stacking and the order-4 unfolding matrix
// ============================================================================

/// Column-stacking of a 2x2 matrix: (m11, m21, m12, m22).
[[nodiscard]] inline std::array<cplx, 4> vec2x2(const Mat2& m) {
    return {m.at(0, 0), m.at(1, 0), m.at(0, 1), m.at(1, 1)};
}

/// The 4x4 matrix pairing the first two modes against the last two: its
/// columns are vec2x2 of the blocks in the order (11),(12),(21),(22), so
/// row (i, j) runs in column-stacking order (11),(21),(12),(22) and the
/// entry at (row (i,j), column (k,l)) is t_{ijkl}.
[[nodiscard]] Mat4c quad_unfolding_matrix(const QuadTensor& q);
[[nodiscard]] Mat4c quad_unfolding_matrix(const Tensor& t);

}  // namespace htr
