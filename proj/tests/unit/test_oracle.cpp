// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "agswap/errors.hpp"
#include "agswap/random.hpp"
#include "agswap/remote_oracle.hpp"
#include "agswap/synthetic_oracle.hpp"

using namespace agswap;
using nlohmann::json;

namespace {

EmbeddingBundle random_bundle(std::size_t h, std::size_t w, SplitMix64& rng, std::string label) {
    std::vector<double> base(h * w);
    for (auto& x : base) x = rng.symmetric();
    return EmbeddingBundle(std::move(label), h, w, std::move(base), {0.5, -0.5});
}

// In-process stand-in for the scoring service.
class FakeService {
public:
    json health = {{"feature_dim", 4}, {"h", 2},     {"w", 3},
                   {"q", 2},           {"deterministic", true}, {"max_concurrency", 2},
                   {"model", "fake"}};
    std::atomic<int> fail_next{0};
    std::atomic<int> fail_status{503};
    std::atomic<int> generate_calls{0};
    std::atomic<int> in_flight{0};
    std::atomic<int> peak_in_flight{0};
    std::chrono::milliseconds generate_delay{0};
    std::mutex ids_mutex;
    std::vector<std::string> request_ids;

    FakeService() {
        server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(health.dump(), "application/json");
        });
        server_.Post("/encode", [this](const httplib::Request& req, httplib::Response& res) {
            if (maybe_fail(res)) return;
            const auto body = json::parse(req.body);
            const auto prompt = body.at("prompt").get<std::string>();
            std::vector<double> base(6);
            for (std::size_t i = 0; i < base.size(); ++i) base[i] = static_cast<double>(prompt.size() + i);
            res.set_content(json{{"label", prompt}, {"h", 2}, {"w", 3}, {"base", base}, {"pooled", {1.0, 2.0}}}.dump(),
                            "application/json");
        });
        server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
            ++generate_calls;
            const int now = ++in_flight;
            for (int peak = peak_in_flight.load(); now > peak && !peak_in_flight.compare_exchange_weak(peak, now);) {
            }
            std::this_thread::sleep_for(generate_delay);
            --in_flight;
            const auto body = json::parse(req.body);
            {
                std::lock_guard lock(ids_mutex);
                request_ids.push_back(body.at("request_id").get<std::string>());
            }
            if (maybe_fail(res)) return;
            const auto base = body.at("base").get<std::vector<double>>();
            std::vector<double> feature(4, 0.0);
            for (std::size_t i = 0; i < base.size(); ++i) feature[i % 4] += base[i];
            double norm = 0.0;
            for (double x : feature) norm += x * x;
            for (double& x : feature) x /= std::sqrt(norm);
            res.set_content(json{{"feature", feature}, {"image_id", "img-" + std::to_string(generate_calls.load())}}.dump(),
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeService() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    bool maybe_fail(httplib::Response& res) {
        if (fail_next.load() <= 0) return false;
        --fail_next;
        res.status = fail_status.load();
        res.set_content(R"({"error":"injected","code":"test"})", "application/json");
        return true;
    }

    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

RemoteOracleOptions fast(const std::string& url) {
    RemoteOracleOptions o;
    o.base_url = url;
    o.initial_backoff = std::chrono::milliseconds(1);
    o.connect_timeout = std::chrono::seconds(2);
    o.read_timeout = std::chrono::seconds(5);
    return o;
}

}  // namespace

TEST_CASE("synthetic health") {
    SyntheticOracleSpec spec;
    spec.k = 24;
    SyntheticOracle oracle(spec);
    const auto caps = oracle.health();
    CHECK(caps.deterministic);
    CHECK(caps.feature_dim == 24);
    CHECK(caps.w == 77);
    CHECK(caps.model == "synthetic-linear");
}

TEST_CASE("synthetic projection matches direct arithmetic") {
    SyntheticOracleSpec spec;
    spec.k = 5;
    spec.h = 3;
    spec.w = 4;
    spec.seed = 21;
    SyntheticOracle oracle(spec);

    // Rebuild P independently: row-major from the seed, scaled by 1/sqrt(h*w).
    SplitMix64 rng(21);
    std::vector<double> p(5 * 12);
    for (auto& x : p) x = rng.symmetric() / std::sqrt(12.0);
    CHECK(oracle.projection() == p);

    SplitMix64 data(4);
    const auto e1 = random_bundle(3, 4, data, "a");
    const auto e2 = random_bundle(3, 4, data, "b");
    const ExchangeVector f({1, 0, 0, 1});
    const auto mixed = oracle.project(swap(e1, e2, f));
    for (std::size_t i = 0; i < 5; ++i) {
        double expected = 0.0;
        for (std::size_t r = 0; r < 3; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                const double v = f[c] ? e1.at(r, c) : e2.at(r, c);
                expected += p[i * 12 + r * 4 + c] * v;
            }
        }
        CHECK(std::abs(mixed[i] - expected) < 1e-10);
    }
}

TEST_CASE("synthetic generate is deterministic and unit norm") {
    SyntheticOracle oracle({});
    const auto e = oracle.encode("A photo of dog", 0);
    const auto a = oracle.generate(e, 0);
    const auto b = oracle.generate(e, 99);
    CHECK(std::equal(a.feature.vec().begin(), a.feature.vec().end(), b.feature.vec().begin()));
    double norm = 0.0;
    for (double x : a.feature.vec()) norm += x * x;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-6);
    CHECK(a.image_id.empty());

    SyntheticOracleSpec tanh_spec;
    tanh_spec.nonlinearity = Nonlinearity::Tanh;
    SyntheticOracle tanh_oracle(tanh_spec);
    CHECK(tanh_oracle.health().model == "synthetic-tanh");
    CHECK(tanh_oracle.generate(e, 0).feature.size() == 64);
}

TEST_CASE("synthetic score is antisymmetric for opposite bundles") {
    SyntheticOracleSpec spec;
    spec.k = 16;
    spec.h = 4;
    spec.w = 8;
    SyntheticOracle oracle(spec);
    SplitMix64 rng(8);
    const auto e1 = random_bundle(4, 8, rng, "a");
    std::vector<double> neg(e1.base().begin(), e1.base().end());
    for (auto& x : neg) x = -x;
    const EmbeddingBundle e2("b", 4, 8, neg, {-0.5, 0.5});

    const auto r1 = oracle.generate(e1, 0).feature;
    const auto r2 = oracle.generate(e2, 0).feature;
    const ExchangeVector f({1, 1, 0, 1, 0, 0, 1, 0});
    const auto s = balance_score(oracle.generate(swap(e1, e2, f), 0).feature, r1, r2).s;
    const auto s_c = balance_score(oracle.generate(swap(e1, e2, f.complement()), 0).feature, r1, r2).s;
    CHECK(s == doctest::Approx(-s_c).epsilon(1e-12));
}

TEST_CASE("synthetic encode") {
    SyntheticOracle oracle({});
    const auto a = oracle.encode("A photo of dog", 0);
    CHECK(a.rows() == 16);
    CHECK(a.cols() == 77);
    CHECK(a.pooled().size() == 16);
    CHECK(a == oracle.encode("A photo of dog", 0));
    CHECK(a.label() == "A photo of dog");
    CHECK_FALSE(a == oracle.encode("A photo of cat", 0));
    CHECK_NOTHROW(oracle.encode("A watercolor of dog", 0));
}

TEST_CASE("synthetic rejects foreign shapes") {
    SyntheticOracle oracle({});
    const EmbeddingBundle small("x", 2, 2, {1, 2, 3, 4}, {});
    CHECK_THROWS_AS(oracle.generate(small, 0), Error);
}

TEST_CASE("parse_health") {
    const auto caps = parse_health(
        R"({"feature_dim":8,"h":2,"w":3,"q":1,"deterministic":false,"max_concurrency":4,"model":"m"})");
    CHECK(caps.feature_dim == 8);
    CHECK(caps.max_concurrency == 4);
    CHECK_FALSE(caps.deterministic);
    try {
        parse_health(R"({"feature_dim":0,"h":2,"w":3,"q":1,"deterministic":true,"max_concurrency":1,"model":"m"})");
        FAIL("expected ProtocolError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProtocolError);
    }
    CHECK_THROWS_AS(parse_health("not json"), Error);
    CHECK_THROWS_AS(parse_health(R"({"h":2})"), Error);
}

TEST_CASE("remote oracle round trip") {
    FakeService service;
    RemoteOracle oracle(fast(service.url()));

    const auto caps = oracle.health();
    CHECK(caps.feature_dim == 4);
    CHECK(caps.max_concurrency == 2);
    CHECK(caps.model == "fake");

    const auto e = oracle.encode("A photo of dog", 0);
    CHECK(e.rows() == 2);
    CHECK(e.cols() == 3);
    CHECK(e.label() == "A photo of dog");
    CHECK(e == oracle.encode("A photo of dog", 0));

    const auto g = oracle.generate(e, 0);
    CHECK(g.feature.size() == 4);
    CHECK(g.image_id == "img-1");

    const EmbeddingBundle wrong("x", 3, 3, std::vector<double>(9, 1.0), {});
    try {
        oracle.generate(wrong, 0);
        FAIL("expected ShapeMismatch");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ShapeMismatch);
    }
}

TEST_CASE("remote oracle retries 5xx with one request id") {
    FakeService service;
    RemoteOracle oracle(fast(service.url()));
    const auto e = oracle.encode("A photo of dog", 0);

    service.fail_next = 2;
    CHECK_NOTHROW(oracle.generate(e, 0));
    CHECK(service.generate_calls == 3);
    {
        std::lock_guard lock(service.ids_mutex);
        REQUIRE(service.request_ids.size() == 3);
        CHECK(service.request_ids[0] == service.request_ids[1]);
        CHECK(service.request_ids[1] == service.request_ids[2]);
    }

    CHECK_NOTHROW(oracle.generate(e, 0));
    {
        std::lock_guard lock(service.ids_mutex);
        CHECK(service.request_ids.back() != service.request_ids.front());
    }

    service.fail_next = 3;
    try {
        oracle.generate(e, 0);
        FAIL("expected OracleFailure");
    } catch (const OracleFailure& f) {
        CHECK(f.attempts() == 3);
        CHECK(f.http_status() == 503);
    }
}

TEST_CASE("remote oracle maps client errors") {
    FakeService service;
    RemoteOracle oracle(fast(service.url()));
    const auto e = oracle.encode("A photo of dog", 0);

    service.fail_status = 400;
    service.fail_next = 1;
    try {
        oracle.generate(e, 0);
        FAIL("expected ProtocolError");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ProtocolError);
    }
    CHECK(service.generate_calls == 1);

    service.fail_status = 422;
    service.fail_next = 1;
    try {
        oracle.generate(e, 0);
        FAIL("expected ShapeMismatch");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ShapeMismatch);
    }
}

TEST_CASE("remote oracle rejects a bad health report") {
    FakeService service;
    service.health["feature_dim"] = 0;
    RemoteOracle oracle(fast(service.url()));
    try {
        oracle.health();
        FAIL("expected ProtocolError");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ProtocolError);
    }
}

TEST_CASE("unreachable remote oracle") {
    int port = 0;
    {
        // Grab a free port, then release it so nothing listens there.
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    RemoteOracle oracle(fast("http://127.0.0.1:" + std::to_string(port)));
    try {
        oracle.health();
        FAIL("expected OracleFailure");
    } catch (const OracleFailure& f) {
        CHECK(f.attempts() == 3);
        CHECK(std::string(f.what()).find("transport error") != std::string::npos);
    }
}

TEST_CASE("remote oracle bounds concurrency") {
    FakeService service;
    service.health["max_concurrency"] = 1;
    service.generate_delay = std::chrono::milliseconds(20);
    RemoteOracle oracle(fast(service.url()));
    const auto e = oracle.encode("A photo of dog", 0);

    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&] {
            oracle.generate(e, 0);
            ++ok;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 4);
    CHECK(service.peak_in_flight == 1);
    std::lock_guard lock(service.ids_mutex);
    CHECK(std::set<std::string>(service.request_ids.begin(), service.request_ids.end()).size() == 4);
}
