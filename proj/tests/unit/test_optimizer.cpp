// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "agswap/optimizer.hpp"
#include "agswap/synthetic_oracle.hpp"
#include "test_support.hpp"

using namespace agswap;
using agswap::testing::ScriptedOracle;

namespace {

EmbeddingBundle random_bundle(std::size_t h, std::size_t w, SplitMix64& rng, std::string label) {
    std::vector<double> base(h * w);
    for (auto& x : base) x = rng.symmetric();
    return EmbeddingBundle(std::move(label), h, w, std::move(base), {});
}

// Feature = normalized row-major flatten of the base matrix.
class FlattenOracle final : public GeneratorOracle {
public:
    Capabilities health() override { return {0, 0, 0, 0, true, 1, "flatten"}; }
    Generation generate(const EmbeddingBundle& b, std::uint64_t) override {
        return {OracleFeature::normalized({b.base().begin(), b.base().end()}), ""};
    }
    EmbeddingBundle encode(std::string_view, std::uint64_t) override {
        throw Error(ErrorCode::InvalidArgument, "not supported");
    }
};

// Fails every generate() after `budget` successful calls.
class FailingOracle final : public GeneratorOracle {
public:
    FailingOracle(GeneratorOracle& inner, std::size_t budget) : inner_(inner), budget_(budget) {}
    Capabilities health() override { return inner_.health(); }
    Generation generate(const EmbeddingBundle& b, std::uint64_t seed) override {
        if (budget_ == 0) throw OracleFailure("service unavailable", 3, 503);
        --budget_;
        return inner_.generate(b, seed);
    }
    EmbeddingBundle encode(std::string_view p, std::uint64_t seed) override { return inner_.encode(p, seed); }

private:
    GeneratorOracle& inner_;
    std::size_t budget_;
};

}  // namespace

TEST_CASE("update_vector moves ones to zeros when s > 0") {
    SplitMix64 rng(1);
    const ExchangeVector f({1, 1, 0, 0});
    const auto step = update_vector(f, 0.5, 1, rng);
    CHECK(step.f.hamming_weight() == 1);
    REQUIRE(step.flipped.size() == 1);
    CHECK(step.flipped[0] < 2);
    CHECK(step.f[2] == false);
    CHECK(step.f[3] == false);
}

TEST_CASE("update_vector clamps the group to the available side") {
    SplitMix64 rng(1);
    const auto step = update_vector(ExchangeVector({1, 1, 0, 0}), -0.5, 3, rng);
    CHECK(step.f == ExchangeVector::ones(4));
    CHECK(step.flipped.size() == 2);
}

TEST_CASE("update_vector literal direction") {
    SplitMix64 rng(2);
    const auto step = update_vector(ExchangeVector({1, 1, 0, 0}), 0.5, 1, rng, true);
    CHECK(step.f.hamming_weight() == 3);
}

TEST_CASE("update_vector with nothing to flip") {
    SplitMix64 rng(3);
    try {
        update_vector(ExchangeVector::zeros(4), 0.5, 2, rng);
        FAIL("expected BiasUnresolvable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BiasUnresolvable);
    }
    CHECK_THROWS_AS(update_vector(ExchangeVector::ones(4), -0.5, 2, rng), Error);
}

TEST_CASE("update_vector samples the source side uniformly") {
    // Ones at positions 0..9 of a width-20 vector; each draw picks 2 of them.
    std::vector<std::uint8_t> bits(20, 0);
    for (std::size_t i = 0; i < 10; ++i) bits[i] = 1;
    const ExchangeVector f(bits);

    std::vector<double> counts(20, 0.0);
    for (std::uint64_t run = 0; run < 1000; ++run) {
        SplitMix64 rng(derive_seed(run, "chi-square"));
        const auto step = update_vector(f, 1.0, 2, rng);
        REQUIRE(step.flipped.size() == 2);
        CHECK(step.flipped[0] != step.flipped[1]);
        for (auto i : step.flipped) counts[i] += 1.0;
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 10; ++i) chi2 += (counts[i] - 200.0) * (counts[i] - 200.0) / 200.0;
    for (std::size_t i = 10; i < 20; ++i) CHECK(counts[i] == 0.0);
    // 9 degrees of freedom, upper 0.1% point.
    CHECK(chi2 < 27.88);
}

TEST_CASE("schedule_size") {
    const OptimizerParams p;
    CHECK(schedule_size(10, 4, p) == ScheduleState{8, 0});
    CHECK(schedule_size(2, 4, p) == ScheduleState{10, 0});
    CHECK(schedule_size(10, 3, p) == ScheduleState{10, 3});
    CHECK(schedule_size(4, 4, p) == ScheduleState{2, 0});
    CHECK(schedule_size(3, 4, p) == ScheduleState{10, 0});
}

TEST_CASE("params validation") {
    OptimizerParams p;
    p.l_min = 12;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.delta_l = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("scheduler law under alternating scores") {
    ScriptedOracle oracle({0.5, -0.5});
    SplitMix64 rng(9);
    const auto e1 = random_bundle(2, 40, rng, "a");
    const auto e2 = random_bundle(2, 40, rng, "b");
    OptimizerParams p;
    p.max_iters = 30;
    const auto r = run_fusion(e1, e2, oracle, p);

    REQUIRE(r.trace.size() == 30);
    CHECK_FALSE(r.converged);
    CHECK(r.stop_reason == StopReason::MaxIterations);
    // Flips at t = 1, 2, ...; the 4th flip lands on t = 4.
    std::vector<std::size_t> expected;
    for (std::size_t t = 0; t < 30; ++t) {
        if (t < 4) expected.push_back(10);
        else if (t < 8) expected.push_back(8);
        else if (t < 12) expected.push_back(6);
        else if (t < 16) expected.push_back(4);
        else if (t < 20) expected.push_back(2);
        else if (t < 24) expected.push_back(10);
        else if (t < 28) expected.push_back(8);
        else expected.push_back(6);
    }
    for (std::size_t t = 0; t < 30; ++t) {
        CAPTURE(t);
        CHECK(r.trace[t].group_size == expected[t]);
        CHECK(r.trace[t].sign_flip == (t > 0));
        CHECK(r.trace[t].flipped.size() == expected[t]);
    }
    CHECK(oracle.calls() == 32);
}

TEST_CASE("identical bundles converge immediately") {
    SyntheticOracle oracle({});
    const auto e = oracle.encode("A photo of dog", 0);
    OptimizerParams p;
    p.rng_seed = 5;
    const auto r = run_fusion(e, e, oracle, p);
    CHECK(r.converged);
    CHECK(r.iterations() == 1);
    CHECK(r.trace[0].score.s == 0.0);
    CHECK(r.final_f == init_exchange_vector(e.cols(), 5));
    CHECK(r.best_f == r.final_f);
}

TEST_CASE("synthetic run converges and the score re-checks") {
    SyntheticOracleSpec spec;
    spec.k = 32;
    spec.h = 8;
    spec.w = 64;
    SyntheticOracle oracle(spec);
    SplitMix64 rng(0);
    const auto e1 = random_bundle(8, 64, rng, "a");
    const auto e2 = random_bundle(8, 64, rng, "b");
    const auto r = run_fusion(e1, e2, oracle, {});
    CHECK(r.converged);
    CHECK(r.best_abs_s < 0.01);
    CHECK(r.iterations() <= 500);

    const auto ref1 = oracle.generate(e1, 0).feature;
    const auto ref2 = oracle.generate(e2, 0).feature;
    const auto fused = oracle.generate(swap(e1, e2, r.final_f), 0).feature;
    CHECK(std::abs(balance_score(fused, ref1, ref2).s) < 0.01);

    double best = 1e9;
    for (const auto& rec : r.trace) {
        best = std::min(best, std::abs(rec.score.s));
        CHECK(rec.f.width() == 64);
    }
    CHECK(best == r.best_abs_s);
    for (std::size_t t = 0; t < r.trace.size(); ++t) CHECK(r.trace[t].t == t);
}

TEST_CASE("fusion is deterministic") {
    SyntheticOracle oracle({});
    const auto e1 = oracle.encode("A photo of dog", 0);
    const auto e2 = oracle.encode("A photo of stove", 0);
    OptimizerParams p;
    p.rng_seed = 17;
    std::ostringstream a, b;
    write_trace(a, run_fusion(e1, e2, oracle, p));
    write_trace(b, run_fusion(e1, e2, oracle, p));
    CHECK(a.str() == b.str());
}

TEST_CASE("biased run lands off balance by s_beta") {
    SyntheticOracle oracle({});
    const auto e1 = oracle.encode("A photo of dog", 0);
    const auto e2 = oracle.encode("A photo of stove", 0);
    OptimizerParams p;
    p.bias = BiasSpec{1.0, 0.0, 0.05};
    const auto r = run_fusion(e1, e2, oracle, p);
    REQUIRE(r.converged);
    CHECK(std::abs(r.best_score.d1 - r.best_score.d2 + 0.05) < 0.01);
}

TEST_CASE("unreachable bias stops with the best vector") {
    SyntheticOracle oracle({});
    const auto e1 = oracle.encode("A photo of dog", 0);
    const auto e2 = oracle.encode("A photo of stove", 0);
    OptimizerParams p;
    p.bias = BiasSpec{1.0, 0.0, 5.0};
    const auto r = run_fusion(e1, e2, oracle, p);
    CHECK_FALSE(r.converged);
    CHECK(r.stop_reason == StopReason::BiasUnresolvable);
    CHECK(r.final_f == ExchangeVector::zeros(e1.cols()));
}

TEST_CASE("oracle failure carries the partial trace") {
    SyntheticOracle inner({});
    const auto e1 = inner.encode("A photo of dog", 0);
    const auto e2 = inner.encode("A photo of stove", 0);
    FailingOracle oracle(inner, 5);
    try {
        run_fusion(e1, e2, oracle, {});
        FAIL("expected FusionInterrupted");
    } catch (const FusionInterrupted& e) {
        REQUIRE(e.partial());
        CHECK(e.partial()->trace.size() == 3);
        CHECK(e.partial()->stop_reason == StopReason::OracleFailure);
        CHECK(e.http_status() == 503);
    }
}

TEST_CASE("refreshing references costs two extra calls per iteration") {
    SyntheticOracle inner({});
    const auto e1 = inner.encode("A photo of dog", 0);
    const auto e2 = inner.encode("A photo of stove", 0);
    OptimizerParams p;
    p.refresh_refs_each_iter = true;
    p.max_iters = 4;
    p.epsilon = 1e-9;
    FailingOracle oracle(inner, 1000);
    const auto r = run_fusion(e1, e2, oracle, p);
    CHECK(r.iterations() == 4);
}

TEST_CASE("brute force small cases") {
    FlattenOracle flat;
    const EmbeddingBundle one("a", 2, 1, {0.3, -0.7}, {});
    const auto trivial = brute_force_search(one, one, flat);
    CHECK(trivial.min_abs_s == 0.0);
    CHECK(trivial.f_opt.width() == 1);

    // Pure features [1,1,0,0] and [0,0,1,1] are orthogonal; one set bit
    // gives d1 = d2 = 1/2.
    const EmbeddingBundle e1("x", 2, 2, {1, 1, 0, 0}, {});
    const EmbeddingBundle e2("y", 2, 2, {0, 0, 1, 1}, {});
    const auto best = brute_force_search(e1, e2, flat);
    CHECK(best.min_abs_s < 1e-15);
    CHECK(best.f_opt.hamming_weight() == 1);
    CHECK(best.f_opt == ExchangeVector({1, 0}));

    const EmbeddingBundle wide("w", 1, 17, std::vector<double>(17, 1.0), {});
    try {
        brute_force_search(wide, wide, flat);
        FAIL("expected WidthTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WidthTooLarge);
    }
}

TEST_CASE("brute force against a direct enumeration") {
    SyntheticOracleSpec spec;
    spec.k = 16;
    spec.h = 4;
    spec.w = 6;
    spec.seed = 3;
    SyntheticOracle oracle(spec);
    SplitMix64 rng(3);
    const auto e1 = random_bundle(4, 6, rng, "a");
    const auto e2 = random_bundle(4, 6, rng, "b");
    const auto best = brute_force_search(e1, e2, oracle);

    const auto r1 = oracle.generate(e1, 0).feature;
    const auto r2 = oracle.generate(e2, 0).feature;
    double min_abs = 1e9;
    for (unsigned mask = 0; mask < 64; ++mask) {
        std::vector<std::uint8_t> bits(6);
        for (unsigned j = 0; j < 6; ++j) bits[j] = (mask >> j) & 1u;
        const auto fused = oracle.generate(swap(e1, e2, ExchangeVector(bits)), 0).feature;
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < fused.size(); ++i) {
            d1 += fused.vec()[i] * r1.vec()[i];
            d2 += fused.vec()[i] * r2.vec()[i];
        }
        min_abs = std::min(min_abs, std::abs(d1 - d2));
    }
    CHECK(best.min_abs_s == doctest::Approx(min_abs).epsilon(1e-12));

    OptimizerParams p;
    p.rng_seed = 3;
    const auto r = run_fusion(e1, e2, oracle, p);
    CHECK(r.best_abs_s <= std::max(0.01, 2.0 * best.min_abs_s));
}

TEST_CASE("trace JSON uses 1-based positions and ends with a summary") {
    SyntheticOracle oracle({});
    const auto e1 = oracle.encode("A photo of dog", 0);
    const auto e2 = oracle.encode("A photo of stove", 0);
    const auto r = run_fusion(e1, e2, oracle, {});
    REQUIRE(r.trace.size() >= 2);

    const auto first = record_to_json(r.trace[0]);
    std::vector<std::size_t> one_based;
    for (auto i : r.trace[0].flipped) one_based.push_back(i + 1);
    CHECK(first.at("flipped").get<std::vector<std::size_t>>() == one_based);
    CHECK(first.at("t") == 0);
    CHECK(first.at("l") == r.trace[0].group_size);

    std::ostringstream out;
    write_trace(out, r);
    std::istringstream in(out.str());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    CHECK(lines.size() == r.trace.size() + 1);
    const auto summary = nlohmann::json::parse(lines.back()).at("summary");
    CHECK(summary.at("converged") == r.converged);
    CHECK(summary.at("iterations") == r.iterations());
}
