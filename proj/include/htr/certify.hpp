/**
 * @file certify.hpp
 * @brief Numerical rank-4 certification for real order-4 tensors: a
 *        16-parameter family of mode-1/mode-2 factor pairs, the rank-one
 *        defect objective on the recovered mode-3/4 factor matrices,
 *        multistart local minimization, certificate extraction, and an
 *        evidence report for the rank-4 / rank-5 dichotomy.
 *
 * The pipeline answers one question about a real 2x2x2x2 tensor T: can it
 * be written as a sum of four real rank-one terms?  Fix four candidate
 * vector pairs (c_k, d_k) for modes 1 and 2 and solve the linear system
 * that expands T's sixteen entries over the products c_{ik} d_{jk}; the
 * solution packs into four 2x2 matrices A_k (one per pair, living on
 * modes 3 and 4) with
 *
 *     t_{ijkl} = sum_k' c_{ik'} d_{jk'} A_{k'}(k, l).
 *
 * T is a sum of four rank-one terms with these (c_k, d_k) exactly when
 * every A_k has rank at most one, i.e. when the four "defects" det(A_k)
 * vanish.  The objective below is the normalized sum of squared defects;
 * driving it to zero and splitting each A_k into a single outer product
 * yields a verifiable certificate.  When no bounded minimizer with
 * vanishing defects exists the search reports the evidence it gathered
 * instead.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "htr/rng.hpp"
#include "htr/tensor.hpp"

namespace htr {

// ============================================================================
// Parameters and recovered factors
// ============================================================================

/// Sixteen real parameters: one quadruple (c_{1k}, d_{1k}, c_{2k}, d_{2k})
/// per pair index k in {0..3}, stored at values[4k .. 4k+3].  The pair k
/// carries the mode-1 vector c_k = (c_{1k}, c_{2k}) and the mode-2 vector
/// d_k = (d_{1k}, d_{2k}).
struct CertificateParams {
    std::array<double, 16> values{};

    [[nodiscard]] Vec2 c(int k) const {
        return {values[4 * k + 0], values[4 * k + 2]};
    }
    [[nodiscard]] Vec2 d(int k) const {
        return {values[4 * k + 1], values[4 * k + 3]};
    }
};

/// Parameters whose pair-product matrix is the 4x4 identity: the pairs
/// (c_k, d_k) run through (e1,e1), (e1,e2), (e2,e1), (e2,e2).
[[nodiscard]] CertificateParams identity_moment_params();

/// The 4x4 matrix whose row k is the Kronecker product c_k (x) d_k, i.e.
/// (c_{1k}d_{1k}, c_{1k}d_{2k}, c_{2k}d_{1k}, c_{2k}d_{2k}).  Expanding a
/// tensor's mode-3/4 fibers over these rows is the linear solve behind
/// recovered_factors, so every consumer requires this matrix to be
/// invertible.
[[nodiscard]] Mat4 moment_matrix(const CertificateParams& p);

/// Relative singularity threshold for the moment matrix: |det M| at or
/// below this value counts as singular.  Quartic in the entries because
/// det M is.
[[nodiscard]] double moment_det_tolerance(const Mat4& m);

/// The 4x4 matrix whose column (i, j) is the mode-3/4 fiber of t at fixed
/// (i, j): entry (2k + l, 2i + j) equals t_{ijkl}.  Requires real data
/// (imaginary parts at most 1e-12 relative); throws std::invalid_argument
/// otherwise.
[[nodiscard]] Mat4 fiber_matrix(const QuadTensor& t);

/// Recovered mode-3/4 factors: N = fiber_matrix(T) * M^{-1}, so that
/// N * M reproduces the fiber matrix and the columns of N, folded into
/// 2x2 matrices A_p = [[n_{0p}, n_{1p}], [n_{2p}, n_{3p}]], satisfy
/// t_{ijkl} = sum_p c_{ip} d_{jp} A_p(k, l) entrywise.
struct FactorMatrix {
    Mat4 n;
    double det_m = 0.0;

    /// A_k, the mode-3/4 factor of pair k (rows = mode 3, cols = mode 4).
    [[nodiscard]] Mat2 factor(int k) const {
        return {n.at(0, k), n.at(1, k), n.at(2, k), n.at(3, k)};
    }

    /// Rank-one defects det(A_k) = n_{0k} n_{3k} - n_{1k} n_{2k}.
    [[nodiscard]] std::array<double, 4> defects() const {
        std::array<double, 4> d{};
        for (int k = 0; k < 4; ++k) {
            d[k] = n.at(0, k) * n.at(3, k) - n.at(1, k) * n.at(2, k);
        }
        return d;
    }
};

/// Solves for the factor matrix at the given parameters.  Throws
/// std::domain_error when |det M| <= moment_det_tolerance(M).
[[nodiscard]] FactorMatrix recovered_factors(const QuadTensor& t,
                                             const CertificateParams& p);

// ============================================================================
// The objective and the defect equations
// ============================================================================

/// Normalized sum of squared rank-one defects,
///
///     f(p) = sum_k det(A_k)^2 / (sum_{mk} n_{mk}^2)^2,
///
/// scale-invariant in N (numerator and denominator both quartic) and zero
/// exactly when every A_k has rank at most one.  Throws std::domain_error
/// on a singular moment matrix.
[[nodiscard]] double objective_f(const QuadTensor& t,
                                 const CertificateParams& p);

/// The four polynomial equations whose joint vanishing (together with an
/// invertible moment matrix) certifies rank at most 4, evaluated as
/// det(M)^2 * det(A_k); det M is reported alongside.  When M is singular
/// the same quantities are computed through the replaced-row determinant
/// form instead, which needs no inverse.
struct DefectEquations {
    std::array<double, 4> values{};
    double det_m = 0.0;
};

[[nodiscard]] DefectEquations condition_e_residuals(const QuadTensor& t,
                                                    const CertificateParams& p);

/// Independent evaluator of the same four equations, written as
/// determinant products: equation k is the 2x2 determinant, over the
/// (k', l') grid, of det(M with row k replaced by the fiber of t at
/// (k', l')).  Agrees with condition_e_residuals on nonsingular M by a
/// replaced-row expansion identity; defined (and used as the fallback)
/// for singular M as well.
[[nodiscard]] std::array<double, 4> condition_e_residuals_raw(
    const QuadTensor& t, const CertificateParams& p);

// ============================================================================
// Multistart minimization
// ============================================================================

struct MinimizeOptions {
    int restarts = 1000;
    std::uint64_t seed = 0;
    /// "simplex" (derivative-free, default) or "gradient" (analytic
    /// gradient with backtracking line search).
    std::string method = "simplex";
};

/// One restart's outcome: the local minimum value and the parameters that
/// attained it.
struct LocalMinimum {
    double value = 0.0;
    CertificateParams params;
};

/// Result of the multistart search.  `restarts[r]` depends only on
/// (seed, r), never on execution order, so parallel and serial runs agree
/// exactly.
struct MinimizeResult {
    CertificateParams best;
    double best_value = 0.0;
    std::vector<LocalMinimum> restarts;
};

/// Minimizes objective_f from `restarts` random starts drawn uniformly
/// from (-1, 1)^16, redrawing any start whose moment matrix is singular;
/// during descent, parameters with a singular moment matrix evaluate to
/// +infinity (barrier by rejection).  Throws std::invalid_argument when
/// the tensor's unfolding matrix is singular (the recovery problem is
/// degenerate) or when the method name is unknown.
[[nodiscard]] MinimizeResult minimize_objective(const QuadTensor& t,
                                                const MinimizeOptions& opt);

// ============================================================================
// Certificate extraction
// ============================================================================

/// Outcome of an extraction attempt: the verified four-term decomposition
/// when the residual check passes, and the absolute Frobenius residual of
/// the best candidate either way.
struct CertificateExtraction {
    std::optional<Decomposition> decomposition;
    double residual = 0.0;
};

/// Projects each recovered A_k to its nearest rank-one matrix and
/// assembles the candidate decomposition with factors
/// (c_k, d_k, u_k, v_k) on modes (1, 2, 3, 4), where A_k ~ u_k v_k^T.
/// Returns the decomposition iff its residual is at most
/// tol * ||T||_F; otherwise only the residual.  Throws std::domain_error
/// on a singular moment matrix.
[[nodiscard]] CertificateExtraction extract_certificate(
    const QuadTensor& t, const CertificateParams& p, double tol);

// ============================================================================
// Evidence report
// ============================================================================

struct EvidenceConfig {
    int restarts = 10000;
    std::uint64_t seed = 0;
    std::string method = "simplex";
    /// Best objective value at or above this counts as a positive floor.
    double floor = 1e-3;
    /// Positive-floor and persistent-failure conclusions need at least
    /// this many restarts to count as evidence.
    int min_restarts = 100;
    /// Relative residual bound a certificate must meet.
    double certificate_tol = 1e-6;
    /// Best relative extraction residual at or above this, across all
    /// restarts, counts as persistent extraction failure.
    double residual_floor = 1e-2;
    /// Free-form tensor label copied into the report.
    std::string tensor_id;
};

struct HistogramBucket {
    double lo = 0.0;
    std::optional<double> hi;  // empty = unbounded above
    int count = 0;
};

/// Evidence gathered by typicality_report.  `conclusion` is one of
/// "rank4-certified" (a verified decomposition accompanies the report),
/// "rank5-candidate" (no certificate, and either the best value stayed at
/// or above the floor or extraction failed persistently across enough
/// restarts), or "inconclusive".  `residual` is the best relative
/// extraction residual seen over all restarts.
struct EvidenceReport {
    std::string tensor_id;
    std::uint64_t seed = 0;
    int restarts = 0;
    double min_f = 0.0;
    std::string conclusion;
    double residual = 0.0;
    std::optional<Decomposition> certificate;
    std::vector<HistogramBucket> histogram;
    std::string note;
};

/// Runs the multistart search, attempts certificate extraction at every
/// restart's minimizer, and aggregates the evidence.  A rank5-candidate
/// verdict is evidence, not proof: the objective's infimum can be
/// unattained, and the note field says so explicitly.  Preconditions and
/// errors as in minimize_objective.
[[nodiscard]] EvidenceReport typicality_report(const QuadTensor& t,
                                               const EvidenceConfig& config);

/// JSON form of a report: keys tensor, seed, restarts, min_f, conclusion,
/// residual, local_minima_histogram, note, plus the embedded certificate
/// when one exists.
[[nodiscard]] nlohmann::json report_json(const EvidenceReport& r);

}  // namespace htr
