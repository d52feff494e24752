/**
 * @file higher.hpp
 * @brief Upper-bound decompositions for tensors of order five and above
 *        (with the order-2/3/4 cases folded in for uniformity): mode
 *        grouping, which reduces to a lower-order decomposer blockwise,
 *        and the stabilized construction, which corrects every
 *        three-mode block by one shared rank-one matrix so each block
 *        splits into two terms, at the price of a single extra term.
 */
#pragma once

#include <functional>
#include <vector>

#include "htr/linalg.hpp"
#include "htr/rng.hpp"
#include "htr/tensor.hpp"

namespace htr {

/// Which construction produced the bound.
enum class HigherConstruction {
    mode_group,  ///< blockwise reduction over a mode split
    stabilized,  ///< shared rank-one correction plus two-term blocks
};

/// A decomposition together with the term bound its construction
/// guarantees; the decomposition never exceeds the bound, and its
/// residual against the input is at most 1e-8 times the input norm.
struct HigherBound {
    Decomposition decomposition;
    int bound = 0;
    HigherConstruction construction = HigherConstruction::mode_group;
};

/// A decomposer for the leading-mode blocks of a mode split, together
/// with the per-block term bound it promises.  `run` receives an order-s
/// tensor and must return a decomposition with at most `bound` terms.
struct InnerDecomposer {
    int bound = 0;
    std::function<Decomposition(const Tensor&)> run;
};

/// Splits the modes at s: each of the 2^(n-s) blocks obtained by fixing
/// the trailing n-s indices is decomposed by `inner`, and every term is
/// tensored with the matching trailing basis vectors.  The bound is
/// inner.bound * 2^(n-s).  Throws std::invalid_argument unless
/// 1 <= s < order, and std::runtime_error when a block decomposition
/// breaks the inner bound's promise.
[[nodiscard]] HigherBound mode_group_bound(const Tensor& t, int s,
                                           const InnerDecomposer& inner);

/// A rank-one matrix C such that every pair (A_j; B_j + C) with
/// A_j != O admits a real two-term decomposition (its pencil invariant
/// is strictly positive); pairs with A_j = O need no condition, since
/// (O; M) has at most two terms for any M.  The search draws the four
/// generating entries of C from small integers (then from a snapped
/// continuous range), and scales the result by doubling until every
/// corrected pair passes.  The determinant of the result is exactly
/// zero.  Throws std::runtime_error, naming the obstruction, if either
/// stage exhausts its attempts.
[[nodiscard]] Mat2 stabilizing_rank_one(const std::vector<SlicePair>& pairs,
                                        Rng& rng);

/// Decomposition of an order-k tensor into at most 2^(k-2)+1 terms
/// (k >= 2).  Real tensors of order >= 4 use the stabilized
/// construction: the 2^(k-3) leading three-mode blocks are corrected by
/// one shared rank-one matrix, each corrected block contributes two
/// terms, and one closing term cancels the corrections.  Complex
/// tensors of order >= 5 group modes at s = 4 over the four-term
/// order-4 decomposer (bound 2^(k-2)); complex order 4 uses that
/// decomposer directly.  Orders 2 and 3 delegate to the matrix and
/// slice-pair paths, whose bounds 2 and 3 match the same formula.
/// Throws std::invalid_argument for order 1.
[[nodiscard]] HigherBound decompose_higher(const Tensor& t,
                                           Field field, Rng& rng);

}  // namespace htr
