// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <string>

#include "agswap/oracle.hpp"

namespace agswap {

struct RemoteOracleOptions {
    // scheme://host:port of the scoring service.
    std::string base_url;
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::seconds connect_timeout{10};
    std::chrono::seconds read_timeout{300};
};

/// HTTP client for the scoring service.
///
///   GET  /health   -> {feature_dim, h, w, q, deterministic, max_concurrency, model}
///   POST /encode   {prompt, seed} -> {label, h, w, base, pooled}
///   POST /generate {base, h, w, pooled, seed, request_id} -> {image_id, feature}
///
/// Transport errors and 5xx replies are retried with exponential backoff; a
/// retried call reuses its request_id so the service can deduplicate it.
/// 400 maps to ProtocolError, 422 to ShapeMismatch. In-flight calls are capped
/// at the max_concurrency the service advertises.
class RemoteOracle final : public GeneratorOracle {
public:
    explicit RemoteOracle(RemoteOracleOptions options);

    Capabilities health() override;
    Generation generate(const EmbeddingBundle& bundle, std::uint64_t seed) override;
    EmbeddingBundle encode(std::string_view prompt, std::uint64_t seed) override;

    [[nodiscard]] const RemoteOracleOptions& options() const noexcept { return options_; }

private:
    struct Reply {
        int status = 0;
        std::string body;
    };

    Reply call(const std::string& method, const std::string& path, const std::string& body);
    std::string next_request_id();
    void acquire();
    void release();

    RemoteOracleOptions options_;
    std::mutex health_mutex_;
    std::optional<Capabilities> health_;

    std::mutex gate_mutex_;
    std::condition_variable gate_cv_;
    std::size_t in_flight_ = 0;

    std::string nonce_;
    std::atomic<std::uint64_t> counter_{0};
};

// Strict parsers for service replies; throw ProtocolError on schema mismatch.
Capabilities parse_health(const std::string& body);

}  // namespace agswap
