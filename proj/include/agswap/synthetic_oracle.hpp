// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "agswap/oracle.hpp"

namespace agswap {

enum class Nonlinearity { Linear, Tanh };

struct SyntheticOracleSpec {
    std::uint64_t seed = 0;
    std::size_t k = 64;
    Nonlinearity nonlinearity = Nonlinearity::Linear;
    // Declared bundle geometry. w = 77 matches the CLIP text context length.
    std::size_t h = 16;
    std::size_t w = 77;
    std::size_t q = 16;
};

/// Desk-scale stand-in for diffusion + segmentation + CLIP.
///
/// generate(): v = normalize(N(P * flatten(base))), flatten row-major, N the
/// identity or elementwise tanh. P is k x (h*w); its entries are drawn in
/// row-major order from SplitMix64(spec.seed) as symmetric() / sqrt(h*w),
/// where symmetric() = 2 * (next() >> 11) * 2^-53 - 1. The pooled vector and
/// the per-call seed do not influence the feature.
///
/// encode(): a causal toy text encoder. The prompt is split on whitespace;
/// column j < n_tokens is seeded by the first j+1 tokens, later (padding)
/// columns by the full prompt and the column index, so two prompts sharing a
/// prefix share exactly those leading columns.
class SyntheticOracle final : public GeneratorOracle {
public:
    explicit SyntheticOracle(const SyntheticOracleSpec& spec);

    Capabilities health() override;
    Generation generate(const EmbeddingBundle& bundle, std::uint64_t seed) override;
    EmbeddingBundle encode(std::string_view prompt, std::uint64_t seed) override;

    [[nodiscard]] const SyntheticOracleSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const std::vector<double>& projection() const noexcept { return projection_; }

    // P * flatten(base) before the nonlinearity and normalization.
    [[nodiscard]] std::vector<double> project(const EmbeddingBundle& bundle) const;

private:
    SyntheticOracleSpec spec_;
    std::vector<double> projection_;
};

}  // namespace agswap
