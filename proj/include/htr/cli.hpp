/**
 * @file cli.hpp
 * @brief Command implementations behind the `htr` executable: pencil
 *        invariants, order-3 classification, rank bounds, rank-4
 *        certification, and the Monte Carlo sampling harness, each
 *        returning a machine-readable document.  The thin binary in
 *        tools/ only parses flags and routes here, so every command is
 *        unit-testable in process.
 *
 * Every document records the seed, the concrete tolerances in force,
 * and the library version.  JSON is the primary format; the sampling
 * harness also emits CSV with a frozen schema (see cmd_sample_csv).
 */
#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "htr/linalg.hpp"
#include "htr/tensor.hpp"

namespace htr {

/// Parsed invocation: which command to run and with what knobs.
struct RunConfig {
    std::string command;          ///< delta | rank222 | bound | certify | sample
    std::string input_path;       ///< tensor file (JSON); commands with input
    Field field = Field::real;
    std::uint64_t seed = 0;
    int restarts = 0;             ///< 0 = per-command default
    int order = 3;                ///< sample only
    int count = 100;              ///< sample only
    std::string out_path;         ///< empty = write the document to stdout
    std::string format = "json";  ///< json | csv (csv: sample only)
    bool verify = false;          ///< re-read and re-verify decompositions
};

/// What a command run produced: the process exit code (0 success,
/// 2 precondition violation, 3 I/O error), the text for stdout, and a
/// diagnostic for stderr when the exit code is nonzero.
struct RunOutcome {
    int exit_code = 0;
    std::string output;
    std::string error;
};

/// Pencil invariants of an order-3 tensor: the hyperdeterminant with
/// its tolerance and sign tests, the theta form, the symmetric dot
/// form, and the nonsingular-pair test.  The seed is only recorded in
/// the document (the command draws nothing).
[[nodiscard]] nlohmann::json cmd_delta(const Tensor& t,
                                       std::uint64_t seed = 0);

/// Order-3 classification report plus a decomposition realizing the
/// rank, with its relative residual.
[[nodiscard]] nlohmann::json cmd_rank222(const Tensor& t, Field field,
                                         std::uint64_t seed = 0);

/// Rank bound by order and field: the dedicated order-4 constructions,
/// the stabilized route for higher real orders, mode grouping for
/// higher complex orders.  Includes the decomposition and residual.
[[nodiscard]] nlohmann::json cmd_bound(const Tensor& t, Field field,
                                       std::uint64_t seed);

/// Rank-4 evidence report for a real order-4 tensor (multistart search,
/// extraction attempts, verdict and histogram).  `restarts` <= 0 uses
/// the default budget.
[[nodiscard]] nlohmann::json cmd_certify(const Tensor& t, int restarts,
                                         std::uint64_t seed,
                                         const std::string& tensor_id);

/// Monte Carlo harness: draws `count` Gaussian tensors of the given
/// order and runs the analysis that fits the order — classification
/// (order 3), the certification pipeline (order 4, with the given
/// restart budget per tensor), or the stabilized bound (orders 5, 6).
/// Deterministic per (seed, field, restarts): row r depends only on
/// them, never on count or execution order.
[[nodiscard]] nlohmann::json cmd_sample(int order, int count,
                                        std::uint64_t seed, Field field,
                                        int restarts);

/// CSV form of cmd_sample, byte-identical for equal arguments.  Header
/// comment lines (prefixed '#') record seed, field, version, and
/// tolerances; then one header row and one data row per tensor:
///   order 3:    index,delta,delta_sign,rank
///   order 4:    index,min_f,residual,conclusion
///   order 5, 6: index,terms,bound,residual
[[nodiscard]] std::string cmd_sample_csv(int order, int count,
                                         std::uint64_t seed, Field field,
                                         int restarts);

/// Runs one parsed invocation end to end: reads the input tensor where
/// the command needs one, produces the document, writes it to
/// `out_path` (or returns it as `output`), and, when `verify` is set,
/// re-reads the emitted document and recomputes the residual of any
/// decomposition it carries against the input tensor.  All errors are
/// mapped to the documented exit codes instead of escaping.
[[nodiscard]] RunOutcome run_command(const RunConfig& cfg);

}  // namespace htr
