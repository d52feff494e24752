#pragma once

namespace htr {

/// Library version reported by the CLI and embedded in every output file.
inline constexpr const char* kVersion = "0.1.0";

} // namespace htr
