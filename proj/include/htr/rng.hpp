/**
 * @file rng.hpp
 * @brief Deterministic pseudo-random generator with a stable cross-platform
 *        bit stream (SplitMix64 core), plus the uniform / Gaussian draws
 *        used throughout the library.
 *
 * Determinism is part of the interface contract: the same seed must produce
 * the same sequence on every platform, which rules out the standard-library
 * distributions (their algorithms are implementation-defined).  The core
 * generator and the double conversions below are fully pinned down.
 */
#pragma once

#include <cmath>
#include <cstdint>

#include "htr/linalg.hpp"

namespace htr {

/// SplitMix64 generator: tiny state, full 64-bit output, no warm-up needed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derives an independent stream for (seed, index) pairs, used to make
    /// per-restart and per-case draws order-independent.
    [[nodiscard]] static Rng derive(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    [[nodiscard]] std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    [[nodiscard]] double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [lo, hi] inclusive (small ranges only).
    [[nodiscard]] int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Standard normal draw (Box-Muller, pairs cached).
    [[nodiscard]] double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // 1 - uniform01() lies in (0, 1], keeping the logarithm finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    [[nodiscard]] cplx gaussian_scalar(Field f) {
        if (f == Field::real) return {gaussian(), 0.0};
        return {gaussian(), gaussian()};
    }

    [[nodiscard]] Vec2 gaussian_vec2(Field f) {
        return {gaussian_scalar(f), gaussian_scalar(f)};
    }

    [[nodiscard]] Mat2 gaussian_mat2(Field f) {
        return {gaussian_scalar(f), gaussian_scalar(f), gaussian_scalar(f),
                gaussian_scalar(f)};
    }

private:
    [[nodiscard]] static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace htr
