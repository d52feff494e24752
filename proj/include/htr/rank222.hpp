/**
 * @file rank222.hpp
 * @brief Exact rank classification of order-3 tensors over the reals and
 *        the complex numbers, constructive minimal decompositions, and the
 *        rank-3 canonical form.
 */
#pragma once

#include <array>

#include "htr/pencil.hpp"
#include "htr/tensor.hpp"

namespace htr {

/// Classification record for an order-3 slice pair (A; B).
///
/// `conditions` are the four alternatives whose disjunction characterizes
/// rank <= 2:
///   [0] some nontrivial combination alpha*A + beta*B vanishes;
///   [1] the stacked column pairs (a1;b1), (a2;b2) are dependent;
///   [2] Delta = 0 and Theta = 0;
///   [3] Delta positive (real field) / nonzero (complex field).
/// The two span dimensions are dim<(a1;a2),(b1;b2)> (the slices as
/// 4-vectors) and dim<(a1;b1),(a2;b2)> (stacked first and second columns).
struct Rank222Report {
    int rank = 0;  // 0, 1, 2, or 3
    std::array<bool, 4> conditions{};
    DeltaValue delta;
    cplx theta{};
    double theta_tol = 0.0;
    int dim_slice_span = 0;
    int dim_column_span = 0;

    [[nodiscard]] bool any_condition() const {
        return conditions[0] || conditions[1] || conditions[2] ||
               conditions[3];
    }
};

[[nodiscard]] Rank222Report classify(const SlicePair& t, Field field);

/// Constructive decomposition with exactly classify(t, field).rank terms;
/// residual <= 1e-8 * ||T||_F, exact on integer inputs where the
/// construction stays in integer arithmetic.  Total: never fails.
[[nodiscard]] Decomposition decompose222(const SlicePair& t, Field field);

/// Result of canonicalize_rank3: an invertible per-mode action g with
/// g.T = (E; S), S = [[0,1],[0,0]], plus the verified transformed pair.
struct Canonicalization {
    GLAction action;
    SlicePair canonical;
};

/// Canonicalizes a tensor of complex rank 3 (Delta = 0, Theta != 0, both
/// spans of dimension 2) to the pair (E; S).  Real inputs with Delta < 0
/// are real-rank 3 but not equivalent to (E; S) by any invertible real or
/// complex action of this kind (their double-root structure is absent), so
/// they are rejected.
/// Throws std::invalid_argument when the precondition fails.
[[nodiscard]] Canonicalization canonicalize_rank3(const SlicePair& t);

}  // namespace htr
