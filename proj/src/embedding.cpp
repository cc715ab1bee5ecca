// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agswap/errors.hpp"
#include "agswap/random.hpp"

namespace agswap {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string shape_text(std::size_t h, std::size_t w) {
    return std::to_string(h) + "x" + std::to_string(w);
}

}  // namespace

EmbeddingBundle::EmbeddingBundle(std::string label, std::size_t h, std::size_t w, std::vector<double> base,
                                 std::vector<double> pooled)
    : label_(std::move(label)), h_(h), w_(w), base_(std::move(base)), pooled_(std::move(pooled)) {
    if (h_ == 0 || w_ == 0) {
        throw Error(ErrorCode::ShapeMismatch, "embedding bundle needs h > 0 and w > 0, got " + shape_text(h_, w_));
    }
    if (base_.size() != h_ * w_) {
        throw Error(ErrorCode::ShapeMismatch, "base has " + std::to_string(base_.size()) +
                                                  " entries, expected " + shape_text(h_, w_));
    }
    if (!all_finite(base_) || !all_finite(pooled_)) {
        throw Error(ErrorCode::NonFinite, "embedding bundle '" + label_ + "' contains NaN or Inf");
    }
}

ExchangeVector::ExchangeVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) throw Error(ErrorCode::InvalidArgument, "exchange vector entries must be 0 or 1");
    }
}

std::size_t ExchangeVector::hamming_weight() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

ExchangeVector ExchangeVector::complement() const {
    std::vector<std::uint8_t> out(bits_.size());
    std::transform(bits_.begin(), bits_.end(), out.begin(), [](std::uint8_t b) { return std::uint8_t(1 - b); });
    return ExchangeVector(std::move(out));
}

std::vector<std::size_t> ExchangeVector::positions(bool value) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if ((bits_[i] != 0) == value) out.push_back(i);
    }
    return out;
}

EmbeddingBundle swap(const EmbeddingBundle& e1, const EmbeddingBundle& e2, const ExchangeVector& f) {
    if (!e1.same_shape(e2)) {
        throw Error(ErrorCode::ShapeMismatch, "cannot mix " + shape_text(e1.rows(), e1.cols()) + " with " +
                                                  shape_text(e2.rows(), e2.cols()));
    }
    if (f.width() != e1.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "exchange vector width " + std::to_string(f.width()) +
                                                  " does not match " + std::to_string(e1.cols()) + " columns");
    }
    if (e1.pooled().size() != e2.pooled().size()) {
        throw Error(ErrorCode::ShapeMismatch, "pooled vectors differ in length");
    }

    const std::size_t h = e1.rows();
    const std::size_t w = e1.cols();
    std::vector<double> base(h * w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            base[r * w + c] = f[c] ? e1.at(r, c) : e2.at(r, c);
        }
    }

    std::vector<double> pooled(e1.pooled().size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        pooled[i] = 0.5 * e1.pooled()[i] + 0.5 * e2.pooled()[i];
    }
    return EmbeddingBundle(e1.label() + " + " + e2.label(), h, w, std::move(base), std::move(pooled));
}

ExchangeVector init_exchange_vector(std::size_t width, std::uint64_t seed) {
    if (width < 2) {
        throw Error(ErrorCode::InvalidWidth, "exchange vector width must be >= 2, got " + std::to_string(width));
    }
    std::vector<std::size_t> order(width);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(seed);
    const auto chosen = sample_without_replacement(std::move(order), width / 2, rng);

    std::vector<std::uint8_t> bits(width, 0);
    for (auto i : chosen) bits[i] = 1;
    return ExchangeVector(std::move(bits));
}

ExchangeVector apply_group(const ExchangeVector& f, const ExchangeGroup& g) {
    std::vector<std::uint8_t> bits(f.bits().begin(), f.bits().end());
    for (auto i : g.indices) {
        if (i >= bits.size()) {
            throw Error(ErrorCode::IndexOutOfBounds, "group index " + std::to_string(i + 1) +
                                                         " outside 1.." + std::to_string(bits.size()));
        }
        bits[i] = g.target ? 1 : 0;
    }
    return ExchangeVector(std::move(bits));
}

nlohmann::json to_json(const EmbeddingBundle& bundle) {
    return {
        {"label", bundle.label()},
        {"h", bundle.rows()},
        {"w", bundle.cols()},
        {"base", std::vector<double>(bundle.base().begin(), bundle.base().end())},
        {"pooled", std::vector<double>(bundle.pooled().begin(), bundle.pooled().end())},
    };
}

EmbeddingBundle bundle_from_json(const nlohmann::json& j) {
    try {
        return EmbeddingBundle(j.at("label").get<std::string>(), j.at("h").get<std::size_t>(),
                               j.at("w").get<std::size_t>(), j.at("base").get<std::vector<double>>(),
                               j.at("pooled").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("malformed embedding bundle: ") + e.what());
    }
}

nlohmann::json to_json(const ExchangeVector& f) {
    auto arr = nlohmann::json::array();
    for (auto b : f.bits()) arr.push_back(static_cast<int>(b));
    return arr;
}

ExchangeVector exchange_vector_from_json(const nlohmann::json& j) {
    try {
        std::vector<std::uint8_t> bits;
        for (const auto& v : j) {
            const int b = v.get<int>();
            if (b != 0 && b != 1) throw Error(ErrorCode::ProtocolError, "exchange vector entries must be 0 or 1");
            bits.push_back(static_cast<std::uint8_t>(b));
        }
        return ExchangeVector(std::move(bits));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("malformed exchange vector: ") + e.what());
    }
}

}  // namespace agswap
