// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace agswap {

/// A concept's text-encoder output: a base matrix of h feature rows by w token
/// columns plus a pooled vector. Stored row-major, the same order as the JSON
/// form. Entries are checked finite at construction.
class EmbeddingBundle {
public:
    EmbeddingBundle(std::string label, std::size_t h, std::size_t w, std::vector<double> base,
                    std::vector<double> pooled);

    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::size_t rows() const noexcept { return h_; }
    [[nodiscard]] std::size_t cols() const noexcept { return w_; }
    [[nodiscard]] std::span<const double> base() const noexcept { return base_; }
    [[nodiscard]] std::span<const double> pooled() const noexcept { return pooled_; }

    [[nodiscard]] double at(std::size_t row, std::size_t col) const { return base_[row * w_ + col]; }

    [[nodiscard]] bool same_shape(const EmbeddingBundle& other) const noexcept {
        return h_ == other.h_ && w_ == other.w_;
    }

    friend bool operator==(const EmbeddingBundle&, const EmbeddingBundle&) = default;

private:
    std::string label_;
    std::size_t h_;
    std::size_t w_;
    std::vector<double> base_;
    std::vector<double> pooled_;
};

/// Binary column selector: bit j = 1 takes column j from the first bundle.
class ExchangeVector {
public:
    ExchangeVector() = default;
    explicit ExchangeVector(std::vector<std::uint8_t> bits);
    static ExchangeVector zeros(std::size_t width) { return ExchangeVector(std::vector<std::uint8_t>(width, 0)); }
    static ExchangeVector ones(std::size_t width) { return ExchangeVector(std::vector<std::uint8_t>(width, 1)); }

    [[nodiscard]] std::size_t width() const noexcept { return bits_.size(); }
    [[nodiscard]] bool operator[](std::size_t i) const { return bits_[i] != 0; }
    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t hamming_weight() const noexcept;
    [[nodiscard]] ExchangeVector complement() const;

    // 0-based positions holding `value`, ascending.
    [[nodiscard]] std::vector<std::size_t> positions(bool value) const;

    friend bool operator==(const ExchangeVector&, const ExchangeVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Positions (0-based in memory) that an update forces to `target`.
struct ExchangeGroup {
    std::vector<std::size_t> indices;
    bool target = false;
};

/// Column-wise mix: column j of the result comes from e1 where f_j = 1 and
/// from e2 otherwise. The pooled vector is the 0.5/0.5 interpolation.
EmbeddingBundle swap(const EmbeddingBundle& e1, const EmbeddingBundle& e2, const ExchangeVector& f);

/// floor(w/2) ones at positions chosen by a seeded uniform permutation.
ExchangeVector init_exchange_vector(std::size_t width, std::uint64_t seed);

/// Copy of f with every index of g set to g.target.
ExchangeVector apply_group(const ExchangeVector& f, const ExchangeGroup& g);

// JSON forms: bundles as {"label","h","w","base","pooled"}; exchange vectors
// as an array of 0/1 integers.
nlohmann::json to_json(const EmbeddingBundle& bundle);
EmbeddingBundle bundle_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExchangeVector& f);
ExchangeVector exchange_vector_from_json(const nlohmann::json& j);

}  // namespace agswap
