// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "agswap/errors.hpp"
#include "agswap/metrics.hpp"
#include "agswap/random.hpp"

using namespace agswap;

namespace {

// Unit feature with prescribed cosines against e_x and e_y.
OracleFeature with_cosines(double d1, double d2) {
    return OracleFeature({d1, d2, std::sqrt(1.0 - d1 * d1 - d2 * d2)});
}

const OracleFeature kX({1.0, 0.0, 0.0});
const OracleFeature kY({0.0, 1.0, 0.0});

}  // namespace

TEST_CASE("cosine basics") {
    CHECK(cosine(kX, kX) == doctest::Approx(1.0));
    CHECK(cosine(kX, kY) == 0.0);
    CHECK_THROWS_AS(cosine(kX, OracleFeature({1.0, 0.0})), Error);
}

TEST_CASE("cosine matches a scalar loop") {
    SplitMix64 rng(7);
    auto draw = [&] {
        std::vector<double> v(8);
        for (auto& x : v) x = rng.symmetric();
        return OracleFeature::normalized(v);
    };
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = draw();
        const auto b = draw();
        double dot = 0.0;
        for (std::size_t i = 0; i < 8; ++i) dot += a.vec()[i] * b.vec()[i];
        CHECK(std::abs(cosine(a, b) - dot) < 1e-12);
    }
}

TEST_CASE("feature validation") {
    CHECK_THROWS_AS(OracleFeature({1.0, 1.0}), Error);
    CHECK_THROWS_AS(OracleFeature(std::vector<double>{}), Error);
    CHECK_THROWS_AS(OracleFeature({std::nan(""), 0.0}), Error);
    CHECK_THROWS_AS(OracleFeature::normalized({0.0, 0.0}), Error);
    const auto f = OracleFeature::normalized({3.0, 4.0});
    CHECK(f.vec()[0] == doctest::Approx(0.6));
    CHECK(f.vec()[1] == doctest::Approx(0.8));
}

TEST_CASE("balance score") {
    const auto same = balance_score(kX, kY, kY);
    CHECK(same.s == 0.0);

    const auto lean = balance_score(kX, kX, kY);
    CHECK(lean.s == doctest::Approx(1.0));
    CHECK(lean.d1 == doctest::Approx(1.0));
    CHECK(lean.d2 == 0.0);

    const auto mid = balance_score(OracleFeature::normalized({1.0, 1.0, 0.0}), kX, kY);
    CHECK(mid.d1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(mid.d2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(mid.s) < 1e-15);
}

TEST_CASE("biased balance score") {
    const auto fused = with_cosines(0.3, 0.6);

    const auto plain = balance_score(fused, kX, kY);
    const auto zero = biased_balance_score(fused, kX, kY, {0.0, 0.0, 0.05});
    CHECK(zero.s == plain.s);

    const auto equal = biased_balance_score(with_cosines(0.4, 0.4), kX, kY, {1.0, 0.0, 0.05});
    CHECK(equal.s == doctest::Approx(0.05).epsilon(1e-12));

    const auto right = biased_balance_score(fused, kX, kY, {0.0, 1.0, 0.05});
    CHECK(right.s == doctest::Approx(0.3 - 0.65).epsilon(1e-12));
    CHECK(right.d1 == doctest::Approx(0.3));
    CHECK(right.d2 == doctest::Approx(0.6));
}

TEST_CASE("eval metrics") {
    const auto m = eval_metrics(0.8, 0.6);
    CHECK(m.avg_sim == doctest::Approx(0.7));
    CHECK(m.balance == doctest::Approx(0.2));

    const auto same = eval_metrics(kX, kX, kX);
    CHECK(same.avg_sim == doctest::Approx(1.0));
    CHECK(same.balance == 0.0);

    const auto fused = with_cosines(0.25, 0.5);
    CHECK(eval_metrics(fused, kX, kY).balance == doctest::Approx(std::abs(balance_score(fused, kX, kY).s)));
}
