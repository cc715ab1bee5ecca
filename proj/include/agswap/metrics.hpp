// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

namespace agswap {

/// Unit-L2 feature of a generated subject image. The constructor rejects
/// vectors whose norm is off by more than 1e-6; use normalized() for raw
/// model output.
class OracleFeature {
public:
    static constexpr double kNormTolerance = 1e-6;

    OracleFeature(std::vector<double> unit_vec, std::string source_label = {});
    static OracleFeature normalized(std::vector<double> raw, std::string source_label = {});

    [[nodiscard]] std::span<const double> vec() const noexcept { return vec_; }
    [[nodiscard]] std::size_t size() const noexcept { return vec_.size(); }
    [[nodiscard]] const std::string& source_label() const noexcept { return label_; }

private:
    std::vector<double> vec_;
    std::string label_;
};

struct BalanceScore {
    double s = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Additive offset applied to each side of the balance score.
struct BiasSpec {
    double alpha_left = 0.0;
    double alpha_right = 0.0;
    double s_beta = 0.05;
};

struct EvalMetrics {
    double avg_sim = 0.0;
    double balance = 0.0;
};

double cosine(const OracleFeature& a, const OracleFeature& b);

/// d1 = cos(fused, ref1), d2 = cos(fused, ref2), s = d1 - d2.
/// s > 0 means the fused output leans toward concept 1.
BalanceScore balance_score(const OracleFeature& fused, const OracleFeature& ref1, const OracleFeature& ref2);

BalanceScore biased_balance_score(const OracleFeature& fused, const OracleFeature& ref1, const OracleFeature& ref2,
                                  const BiasSpec& bias);

EvalMetrics eval_metrics(const OracleFeature& fused, const OracleFeature& ref1, const OracleFeature& ref2);

// Same metrics from already computed cosines.
EvalMetrics eval_metrics(double d1, double d2) noexcept;

}  // namespace agswap
