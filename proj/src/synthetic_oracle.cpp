// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/synthetic_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "agswap/errors.hpp"
#include "agswap/random.hpp"

namespace agswap {

namespace {

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::istringstream in{std::string(text)};
    for (std::string word; in >> word;) words.push_back(word);
    return words;
}

std::vector<double> fill(std::uint64_t seed, std::size_t n) {
    SplitMix64 rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = rng.symmetric();
    return out;
}

}  // namespace

SyntheticOracle::SyntheticOracle(const SyntheticOracleSpec& spec) : spec_(spec) {
    if (spec_.k == 0 || spec_.h == 0 || spec_.w == 0) {
        throw Error(ErrorCode::InvalidArgument, "synthetic oracle needs k, h, w > 0");
    }
    const std::size_t cols = spec_.h * spec_.w;
    const double norm = std::sqrt(static_cast<double>(cols));
    projection_ = fill(spec_.seed, spec_.k * cols);
    for (auto& x : projection_) x /= norm;
}

Capabilities SyntheticOracle::health() {
    Capabilities caps;
    caps.feature_dim = spec_.k;
    caps.h = spec_.h;
    caps.w = spec_.w;
    caps.q = spec_.q;
    caps.deterministic = true;
    caps.max_concurrency = std::max(1u, std::thread::hardware_concurrency());
    caps.model = spec_.nonlinearity == Nonlinearity::Linear ? "synthetic-linear" : "synthetic-tanh";
    return caps;
}

std::vector<double> SyntheticOracle::project(const EmbeddingBundle& bundle) const {
    if (bundle.rows() != spec_.h || bundle.cols() != spec_.w) {
        throw Error(ErrorCode::ShapeMismatch, "synthetic oracle expects " + std::to_string(spec_.h) + "x" +
                                                  std::to_string(spec_.w) + " bundles, got " +
                                                  std::to_string(bundle.rows()) + "x" + std::to_string(bundle.cols()));
    }
    const std::size_t cols = spec_.h * spec_.w;
    const auto x = bundle.base();
    std::vector<double> v(spec_.k, 0.0);
    for (std::size_t i = 0; i < spec_.k; ++i) {
        const double* row = projection_.data() + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        v[i] = acc;
    }
    return v;
}

Generation SyntheticOracle::generate(const EmbeddingBundle& bundle, std::uint64_t /*seed*/) {
    auto v = project(bundle);
    if (spec_.nonlinearity == Nonlinearity::Tanh) {
        std::transform(v.begin(), v.end(), v.begin(), [](double x) { return std::tanh(x); });
    }
    try {
        return {OracleFeature::normalized(std::move(v), bundle.label()), {}};
    } catch (const Error& e) {
        throw OracleFailure(std::string("synthetic oracle produced a degenerate feature: ") + e.what());
    }
}

EmbeddingBundle SyntheticOracle::encode(std::string_view prompt, std::uint64_t /*seed*/) {
    const auto words = split_words(prompt);
    if (words.empty()) throw Error(ErrorCode::InvalidArgument, "prompt is empty");

    const std::uint64_t stream = derive_seed(spec_.seed, "encode");
    const std::size_t h = spec_.h;
    const std::size_t w = spec_.w;
    std::vector<double> base(h * w);

    std::string prefix;
    for (std::size_t c = 0; c < w; ++c) {
        std::string key;
        if (c < words.size()) {
            if (!prefix.empty()) prefix += ' ';
            prefix += words[c];
            key = prefix;
        } else {
            key = std::string(prompt) + "\x1f" + std::to_string(c);
        }
        const auto column = fill(derive_seed(stream, key), h);
        for (std::size_t r = 0; r < h; ++r) base[r * w + c] = column[r];
    }
    auto pooled = fill(derive_seed(derive_seed(spec_.seed, "pooled"), prompt), spec_.q);
    return EmbeddingBundle(std::string(prompt), h, w, std::move(base), std::move(pooled));
}

}  // namespace agswap
