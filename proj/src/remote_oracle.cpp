// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/remote_oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "agswap/errors.hpp"

namespace agswap {

namespace {

using nlohmann::json;

// Largest accepted deviation of a service feature from unit norm.
constexpr double kServiceNormTolerance = 1e-3;

json parse_body(const std::string& body, const char* what) {
    try {
        auto j = json::parse(body);
        if (!j.is_object()) throw Error(ErrorCode::ProtocolError, std::string(what) + " reply is not a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ProtocolError, std::string(what) + " reply is not valid JSON: " + e.what());
    }
}

const json& field(const json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorCode::ProtocolError, std::string(what) + " reply lacks \"" + key + "\"");
    return *it;
}

std::size_t positive_int(const json& j, const char* key, const char* what) {
    const auto& v = field(j, key, what);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw Error(ErrorCode::ProtocolError, std::string(what) + " field \"" + key + "\" must be a positive integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> number_array(const json& j, const char* key, const char* what) {
    const auto& v = field(j, key, what);
    if (!v.is_array()) throw Error(ErrorCode::ProtocolError, std::string(what) + " field \"" + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) throw Error(ErrorCode::ProtocolError, std::string(what) + " field \"" + key + "\" holds a non-number");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string error_detail(const std::string& body) {
    try {
        auto j = json::parse(body);
        if (j.is_object() && j.contains("error")) {
            std::string detail = j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
            if (j.contains("code") && j["code"].is_string()) detail += " [" + j["code"].get<std::string>() + "]";
            return detail;
        }
    } catch (const json::exception&) {
    }
    return body.substr(0, 200);
}

bool retryable(int status) { return status == 0 || status >= 500; }

}  // namespace

Capabilities parse_health(const std::string& body) {
    const auto j = parse_body(body, "/health");
    Capabilities caps;
    caps.feature_dim = positive_int(j, "feature_dim", "/health");
    caps.h = positive_int(j, "h", "/health");
    caps.w = positive_int(j, "w", "/health");
    caps.q = positive_int(j, "q", "/health");
    caps.max_concurrency = positive_int(j, "max_concurrency", "/health");
    const auto& det = field(j, "deterministic", "/health");
    if (!det.is_boolean()) throw Error(ErrorCode::ProtocolError, "/health field \"deterministic\" must be a boolean");
    caps.deterministic = det.get<bool>();
    const auto& model = field(j, "model", "/health");
    if (!model.is_string()) throw Error(ErrorCode::ProtocolError, "/health field \"model\" must be a string");
    caps.model = model.get<std::string>();
    return caps;
}

RemoteOracle::RemoteOracle(RemoteOracleOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw Error(ErrorCode::InvalidArgument, "remote oracle needs a base URL");
    while (!options_.base_url.empty() && options_.base_url.back() == '/') options_.base_url.pop_back();
    if (options_.attempts < 1) options_.attempts = 1;

    std::random_device rd;
    std::ostringstream nonce;
    nonce << std::hex << ((std::uint64_t{rd()} << 32) | rd());
    nonce_ = nonce.str();
}

std::string RemoteOracle::next_request_id() { return nonce_ + "-" + std::to_string(counter_.fetch_add(1)); }

void RemoteOracle::acquire() {
    const std::size_t limit = health().max_concurrency;
    std::unique_lock lock(gate_mutex_);
    gate_cv_.wait(lock, [&] { return in_flight_ < limit; });
    ++in_flight_;
}

void RemoteOracle::release() {
    {
        std::lock_guard lock(gate_mutex_);
        --in_flight_;
    }
    gate_cv_.notify_one();
}

RemoteOracle::Reply RemoteOracle::call(const std::string& method, const std::string& path, const std::string& body) {
    std::string last_error;
    int last_status = 0;
    for (int attempt = 1; attempt <= options_.attempts; ++attempt) {
        if (attempt > 1) std::this_thread::sleep_for(options_.initial_backoff * (1 << (attempt - 2)));

        httplib::Client client(options_.base_url);
        if (!client.is_valid()) throw OracleFailure("invalid oracle URL '" + options_.base_url + "'", attempt, 0);
        client.set_connection_timeout(options_.connect_timeout);
        client.set_read_timeout(options_.read_timeout);

        httplib::Result res = method == "GET" ? client.Get(path) : client.Post(path, body, "application/json");
        if (!res) {
            last_status = 0;
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return {res->status, res->body};

        last_status = res->status;
        last_error = "HTTP " + std::to_string(res->status) + ": " + error_detail(res->body);
        if (res->status == 400) throw Error(ErrorCode::ProtocolError, path + " rejected the request: " + last_error);
        if (res->status == 422) throw Error(ErrorCode::ShapeMismatch, path + " rejected the bundle shape: " + last_error);
        if (!retryable(res->status)) break;
    }
    throw OracleFailure(method + " " + options_.base_url + path + " failed after " +
                            std::to_string(options_.attempts) + " attempt(s): " + last_error,
                        options_.attempts, last_status);
}

Capabilities RemoteOracle::health() {
    std::lock_guard lock(health_mutex_);
    if (!health_) health_ = parse_health(call("GET", "/health", {}).body);
    return *health_;
}

EmbeddingBundle RemoteOracle::encode(std::string_view prompt, std::uint64_t seed) {
    const auto caps = health();
    const json request = {{"prompt", std::string(prompt)}, {"seed", seed}};

    const auto reply = [&] {
        acquire();
        struct Permit {
            RemoteOracle* self;
            ~Permit() { self->release(); }
        } permit{this};
        return call("POST", "/encode", request.dump());
    }();

    const auto j = parse_body(reply.body, "/encode");
    const auto h = positive_int(j, "h", "/encode");
    const auto w = positive_int(j, "w", "/encode");
    if (h != caps.h || w != caps.w) {
        throw Error(ErrorCode::ProtocolError, "/encode returned a " + std::to_string(h) + "x" + std::to_string(w) +
                                                  " bundle but /health declared " + std::to_string(caps.h) + "x" +
                                                  std::to_string(caps.w));
    }
    auto base = number_array(j, "base", "/encode");
    auto pooled = number_array(j, "pooled", "/encode");
    if (base.size() != h * w) throw Error(ErrorCode::ProtocolError, "/encode base length does not match h*w");
    try {
        // The prompt is the label; the service's own label field is informational.
        return EmbeddingBundle(std::string(prompt), h, w, std::move(base), std::move(pooled));
    } catch (const Error& e) {
        throw Error(ErrorCode::ProtocolError, std::string("/encode returned an invalid bundle: ") + e.what());
    }
}

Generation RemoteOracle::generate(const EmbeddingBundle& bundle, std::uint64_t seed) {
    const auto caps = health();
    if (bundle.rows() != caps.h || bundle.cols() != caps.w) {
        throw Error(ErrorCode::ShapeMismatch, "service expects " + std::to_string(caps.h) + "x" +
                                                  std::to_string(caps.w) + " bundles, got " +
                                                  std::to_string(bundle.rows()) + "x" + std::to_string(bundle.cols()));
    }
    const json request = {
        {"base", std::vector<double>(bundle.base().begin(), bundle.base().end())},
        {"h", bundle.rows()},
        {"w", bundle.cols()},
        {"pooled", std::vector<double>(bundle.pooled().begin(), bundle.pooled().end())},
        {"seed", seed},
        {"request_id", next_request_id()},
    };

    const auto reply = [&] {
        acquire();
        struct Permit {
            RemoteOracle* self;
            ~Permit() { self->release(); }
        } permit{this};
        return call("POST", "/generate", request.dump());
    }();

    const auto j = parse_body(reply.body, "/generate");
    const auto& image_id = field(j, "image_id", "/generate");
    if (!image_id.is_string()) throw Error(ErrorCode::ProtocolError, "/generate field \"image_id\" must be a string");
    auto feature = number_array(j, "feature", "/generate");
    if (feature.size() != caps.feature_dim) {
        throw Error(ErrorCode::ProtocolError, "/generate feature has length " + std::to_string(feature.size()) +
                                                  ", /health declared " + std::to_string(caps.feature_dim));
    }
    double norm = 0.0;
    for (double x : feature) norm += x * x;
    norm = std::sqrt(norm);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kServiceNormTolerance) {
        throw Error(ErrorCode::ProtocolError, "/generate feature is not unit norm (" + std::to_string(norm) + ")");
    }
    return {OracleFeature::normalized(std::move(feature), bundle.label()), image_id.get<std::string>()};
}

}  // namespace agswap
