// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "agswap/embedding.hpp"
#include "agswap/metrics.hpp"

namespace agswap {

struct Capabilities {
    std::size_t feature_dim = 0;
    std::size_t h = 0;
    std::size_t w = 0;
    std::size_t q = 0;
    bool deterministic = false;
    // 1 means the oracle must be called from one thread at a time.
    std::size_t max_concurrency = 1;
    std::string model;
};

struct Generation {
    OracleFeature feature;
    // Service-side handle of the rendered image; empty for in-process oracles.
    std::string image_id;
};

/// Generation + scoring boundary. Maps a (possibly mixed) embedding bundle to
/// the unit feature of the image it renders, and text prompts to bundles.
///
/// Implementations must be safe to call concurrently up to
/// health().max_concurrency.
class GeneratorOracle {
public:
    virtual ~GeneratorOracle() = default;

    virtual Capabilities health() = 0;
    virtual Generation generate(const EmbeddingBundle& bundle, std::uint64_t seed) = 0;
    virtual EmbeddingBundle encode(std::string_view prompt, std::uint64_t seed) = 0;
};

}  // namespace agswap
