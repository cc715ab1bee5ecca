// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace agswap {

// SplitMix64. Every random decision in the library draws from this generator
// so that results are bit-stable across compilers and standard libraries
// (std::uniform_int_distribution and friends are implementation-defined).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [-1, 1).
    double symmetric() noexcept { return 2.0 * unit() - 1.0; }

    [[nodiscard]] std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

// SplitMix64 finalizer applied to a single value.
std::uint64_t mix64(std::uint64_t x) noexcept;

// FNV-1a over the bytes of `text`, folded into `seed` through mix64.
// Used for named sub-streams: derive_seed(seed, "update"), per-pair seeds, ...
std::uint64_t derive_seed(std::uint64_t seed, std::string_view text) noexcept;

// Uniform sample of `count` distinct elements of `pool` (partial Fisher-Yates).
// The returned order is the draw order. count is clamped to pool.size().
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t count,
                                                    SplitMix64& rng);

}  // namespace agswap
