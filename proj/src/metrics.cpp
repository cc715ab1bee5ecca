// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "agswap/errors.hpp"

namespace agswap {

namespace {

double l2_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

void require_finite(const std::vector<double>& v) {
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
        throw Error(ErrorCode::NonFinite, "feature vector contains NaN or Inf");
    }
}

}  // namespace

OracleFeature::OracleFeature(std::vector<double> unit_vec, std::string source_label)
    : vec_(std::move(unit_vec)), label_(std::move(source_label)) {
    if (vec_.empty()) throw Error(ErrorCode::LengthMismatch, "feature vector is empty");
    require_finite(vec_);
    const double norm = l2_norm(vec_);
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::NotUnitNorm, "feature norm " + std::to_string(norm) + " is not 1");
    }
}

OracleFeature OracleFeature::normalized(std::vector<double> raw, std::string source_label) {
    if (raw.empty()) throw Error(ErrorCode::LengthMismatch, "feature vector is empty");
    require_finite(raw);
    const double norm = l2_norm(raw);
    if (!(norm > 0.0)) throw Error(ErrorCode::NotUnitNorm, "cannot normalize a zero feature vector");
    for (double& x : raw) x /= norm;
    return OracleFeature(std::move(raw), std::move(source_label));
}

double cosine(const OracleFeature& a, const OracleFeature& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "feature lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a.vec()[i] * b.vec()[i];
    // Rounding can push |dot| a hair past 1 for parallel unit vectors.
    return std::clamp(dot, -1.0, 1.0);
}

BalanceScore balance_score(const OracleFeature& fused, const OracleFeature& ref1, const OracleFeature& ref2) {
    const double d1 = cosine(fused, ref1);
    const double d2 = cosine(fused, ref2);
    return {d1 - d2, d1, d2};
}

BalanceScore biased_balance_score(const OracleFeature& fused, const OracleFeature& ref1, const OracleFeature& ref2,
                                  const BiasSpec& bias) {
    const double d1 = cosine(fused, ref1);
    const double d2 = cosine(fused, ref2);
    const double s = (bias.alpha_left * bias.s_beta + d1) - (bias.alpha_right * bias.s_beta + d2);
    return {s, d1, d2};
}

EvalMetrics eval_metrics(double d1, double d2) noexcept {
    return {0.5 * (d1 + d2), std::abs(d1 - d2)};
}

EvalMetrics eval_metrics(const OracleFeature& fused, const OracleFeature& ref1, const OracleFeature& ref2) {
    return eval_metrics(cosine(fused, ref1), cosine(fused, ref2));
}

}  // namespace agswap
