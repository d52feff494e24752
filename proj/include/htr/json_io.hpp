/**
 * @file json_io.hpp
 * @brief JSON (de)serialization for tensors and decompositions.
 *
 * Tensor file shape:
 *   {"order": n, "field": "real"|"complex", "data": [s, ...]}
 * with real scalars written as plain numbers, complex scalars as [re, im]
 * pairs, and `data` listed in flat-offset order (first mode most
 * significant).  The writer emits exactly this shape; the reader rejects
 * wrong lengths and malformed scalars.
 */
#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "htr/tensor.hpp"

namespace htr {

/// Raised for unreadable/unwritable files and malformed file content.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[nodiscard]] nlohmann::json to_json(const Tensor& t);
[[nodiscard]] Tensor tensor_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const Decomposition& d);
[[nodiscard]] Decomposition decomposition_from_json(const nlohmann::json& j);

/// Reads and parses a tensor file; throws IoError on any failure.
[[nodiscard]] Tensor read_tensor_file(const std::string& path);

/// Writes pretty-printed JSON to a file; throws IoError on failure.
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Parses a JSON document from a file; throws IoError on failure.
[[nodiscard]] nlohmann::json read_json_file(const std::string& path);

}  // namespace htr
