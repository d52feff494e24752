/**
 * @file bound2222.hpp
 * @brief Constructive rank upper bounds for order-4 tensors: the one-sided
 *        separation lemma, the zero-part and half-rank-2 constructions
 *        (at most 4 terms), the peel-one-term bound of 5 over the reals,
 *        the degree-2 root construction giving 4 over the complex numbers,
 *        and slice-rank profiling across the essential flattenings.
 */
#pragma once

#include <array>
#include <optional>
#include <string>

#include "htr/rank222.hpp"
#include "htr/rng.hpp"

namespace htr {

/// Outcome of an order-4 bound computation.
///
/// `branch` names the construction that produced the terms:
///   "direct"              concatenation of the two half decompositions;
///   "onewayseparate"      rank-one split of the first half plus a mixed
///                         second half with positive / nonzero Delta;
///   "onepartiszero"       the four-way split of an (E; O) first half;
///   "leq2implies4a"       quartic pencil mixing of a rank-2 first half
///                         against a rank-3 second half;
///   "kong5"               one rank-one term peeled off a rank-3 first
///                         half, remainder bounded by 4;
///   "brylinski4"          degree-2 root mixing of the halves over the
///                         complex numbers;
///   "degenerate-fallback" plain concatenation after every targeted route
///                         failed; bound_claimed reports the honest count.
struct BoundResult {
    Decomposition decomposition;
    int bound_claimed = 0;
    std::string branch;
};

/// Four-term decomposition of the order-4 tensor whose first half (along
/// the third mode) is T1 + T2 and whose second half is B, built from the
/// identity (T1 + T2; B) = (T1; -xT1) + (T2; B + xT1) once an x with
/// Delta(B + xT1) positive (real field) / nonzero (complex field) is
/// found.  The search tries x in {0, +-1, +-2, +-4, ..., +-2^20} and then
/// 64 draws from `rng`; returns std::nullopt when every candidate fails.
/// Throws std::invalid_argument unless T1 and T2 both have rank exactly 1.
[[nodiscard]] std::optional<Decomposition> split_and_separate(
    const SlicePair& t1, const SlicePair& t2, const SlicePair& b,
    Field field, Rng& rng);

/// Decomposition (at most 4 terms generically) of an order-4 tensor whose
/// first half is the pair (identity; zero).  Splits the identity along one
/// of four rank-one pairs chosen by the first usable linear coefficient of
/// the second half's last block; when all four coefficients vanish that
/// block is zero and the tensor reduces to an order-3 problem with at most
/// 3 terms.  Throws std::invalid_argument when the first half is not
/// (identity; zero) to tolerance.
[[nodiscard]] Decomposition decompose_eo_form(const QuadTensor& y,
                                              Field field, Rng& rng);

/// Decomposition with at most 4 terms (5 only on the degenerate fallback)
/// of an order-4 tensor whose first half has rank at most 2.  Throws
/// std::invalid_argument when the first half classifies as rank 3.
[[nodiscard]] Decomposition decompose_when_half_rank2(const QuadTensor& y,
                                                      Field field, Rng& rng);

/// Rank bound over the reals: at most 5 terms.  Total; `rng` feeds the
/// stochastic tail of the mixing searches, and equal seeds give equal
/// outputs.
[[nodiscard]] BoundResult bound_real(const QuadTensor& y, Rng& rng);

/// Rank bound over the complex numbers: at most 4 terms.  Real input data
/// is embedded; the result is a complex decomposition.  Total.
[[nodiscard]] BoundResult bound_complex(const QuadTensor& y, Rng& rng);

/// Classification ranks of the four adjacent slice pairs, for each of the
/// six essential flattenings: row f lists the ranks of (T11; T12),
/// (T11; T21), (T21; T22), (T12; T22) of the tensor flattened by
/// essential_flattenings()[f].
using SliceRankTable = std::array<std::array<int, 4>, 6>;

[[nodiscard]] SliceRankTable slice_rank_profile(const QuadTensor& y,
                                                Field field = Field::real);

/// Rank of the 4x4 unfolding matrix (pivots above rel_tol times the
/// Frobenius norm), a lower bound for the tensor rank and hence for the
/// term count of any faithful decomposition.
[[nodiscard]] int unfolding_rank(const QuadTensor& y, double rel_tol = 1e-7);

/// The distinguished integer tensor whose unfolding matrix has determinant
/// one and whose four adjacent slice pairs keep rank 3 under every
/// essential flattening; the running example for the rank-certificate
/// machinery.  Block array: (E, [[0,-1],[1,0]]; [[0,2],[-1,0]], diag(1,2)).
[[nodiscard]] QuadTensor slice_rank3_example();

}  // namespace htr
