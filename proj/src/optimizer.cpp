// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/optimizer.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace agswap {

void OptimizerParams::validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
    if (l_min == 0) throw Error(ErrorCode::InvalidArgument, "l_min must be >= 1");
    if (l_min > l_init) throw Error(ErrorCode::InvalidArgument, "l_min must not exceed l_init");
    if (delta_l == 0) throw Error(ErrorCode::InvalidArgument, "delta_l must be >= 1");
    if (flip_threshold == 0) throw Error(ErrorCode::InvalidArgument, "flip_threshold must be >= 1");
    if (max_iters == 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    if (bias && (bias->alpha_left < 0.0 || bias->alpha_right < 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bias weights must be >= 0");
    }
}

const char* to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::Converged: return "converged";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::BiasUnresolvable: return "bias_unresolvable";
        case StopReason::OracleFailure: return "oracle_failure";
    }
    return "unknown";
}

UpdateStep update_vector(const ExchangeVector& f, double s, std::size_t l, SplitMix64& rng, bool literal_direction) {
    if (l == 0) throw Error(ErrorCode::InvalidArgument, "group size must be >= 1");
    if (s == 0.0) throw Error(ErrorCode::InvalidArgument, "update direction is undefined for s = 0");

    // Similarity reading: too close to concept 1 -> give columns to concept 2.
    bool target = s < 0.0;
    if (literal_direction) target = !target;

    auto pool = f.positions(!target);
    if (pool.empty()) {
        throw Error(ErrorCode::BiasUnresolvable,
                    std::string("no ") + (target ? "zero" : "one") + " entries left to flip");
    }
    auto group = sample_without_replacement(std::move(pool), l, rng);
    auto next = apply_group(f, ExchangeGroup{group, target});
    return {std::move(next), std::move(group)};
}

ScheduleState schedule_size(std::size_t current_l, std::size_t flip_count, const OptimizerParams& params) {
    if (flip_count < params.flip_threshold) return {current_l, flip_count};
    if (current_l < params.l_min + params.delta_l) return {params.l_init, 0};
    return {current_l - params.delta_l, 0};
}

namespace {

BalanceScore score_of(const OracleFeature& fused, const OracleFeature& r1, const OracleFeature& r2,
                      const OptimizerParams& params) {
    return params.bias ? biased_balance_score(fused, r1, r2, *params.bias) : balance_score(fused, r1, r2);
}

struct References {
    Generation first;
    Generation second;
};

References make_references(const EmbeddingBundle& e1, const EmbeddingBundle& e2, GeneratorOracle& oracle,
                           std::uint64_t seed) {
    auto g1 = oracle.generate(e1, seed);
    auto g2 = oracle.generate(e2, seed);
    if (g1.feature.size() != g2.feature.size()) {
        throw Error(ErrorCode::LengthMismatch, "reference features differ in length");
    }
    return {std::move(g1), std::move(g2)};
}

}  // namespace

FusionResult run_fusion(const EmbeddingBundle& e1, const EmbeddingBundle& e2, GeneratorOracle& oracle,
                        const OptimizerParams& params) {
    params.validate();
    if (!e1.same_shape(e2)) throw Error(ErrorCode::ShapeMismatch, "bundles to fuse differ in shape");

    FusionResult result;
    result.best_abs_s = std::numeric_limits<double>::infinity();
    const std::size_t w = e1.cols();
    ExchangeVector f = init_exchange_vector(w, params.rng_seed);
    SplitMix64 rng(derive_seed(params.rng_seed, "update"));

    std::size_t group_size = params.l_init;
    std::size_t flips = 0;
    int previous_sign = 0;

    auto finish = [&](StopReason reason) {
        result.final_f = f;
        result.stop_reason = reason;
        result.converged = reason == StopReason::Converged;
        if (!result.trace.empty()) {
            const auto& best = result.trace[result.best_t];
            result.best_f = best.f;
            result.best_score = best.score;
            result.metrics = eval_metrics(best.score.d1, best.score.d2);
        } else {
            result.best_f = f;
        }
    };

    try {
        auto refs = make_references(e1, e2, oracle, params.rng_seed);
        result.ref1_image_id = refs.first.image_id;
        result.ref2_image_id = refs.second.image_id;

        for (std::size_t t = 0; t < params.max_iters; ++t) {
            std::uint64_t gen_seed = params.rng_seed;
            if (params.refresh_refs_each_iter) {
                gen_seed = derive_seed(params.rng_seed, "iteration-" + std::to_string(t));
                refs = make_references(e1, e2, oracle, gen_seed);
            }
            auto generated = oracle.generate(swap(e1, e2, f), gen_seed);

            IterationRecord record;
            record.t = t;
            record.f = f;
            record.score = score_of(generated.feature, refs.first.feature, refs.second.feature, params);
            record.group_size = group_size;

            const double abs_s = std::abs(record.score.s);
            if (abs_s < result.best_abs_s) {
                result.best_abs_s = abs_s;
                result.best_t = t;
                result.best_image_id = generated.image_id;
            }

            if (abs_s < params.epsilon) {
                result.trace.push_back(std::move(record));
                finish(StopReason::Converged);
                return result;
            }

            const int sign = record.score.s > 0.0 ? 1 : -1;
            if (previous_sign != 0 && sign != previous_sign) {
                ++flips;
                record.sign_flip = true;
            }
            previous_sign = sign;

            const auto next = schedule_size(group_size, flips, params);
            group_size = next.group_size;
            flips = next.flip_count;
            record.group_size = group_size;

            try {
                auto step = update_vector(f, record.score.s, group_size, rng, params.literal_direction);
                record.flipped = std::move(step.flipped);
                result.trace.push_back(std::move(record));
                f = std::move(step.f);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::BiasUnresolvable) throw;
                result.trace.push_back(std::move(record));
                finish(StopReason::BiasUnresolvable);
                return result;
            }
        }
    } catch (const OracleFailure& failure) {
        finish(StopReason::OracleFailure);
        throw FusionInterrupted(failure, std::make_shared<const FusionResult>(std::move(result)));
    }

    finish(StopReason::MaxIterations);
    return result;
}

BruteForceResult brute_force_search(const EmbeddingBundle& e1, const EmbeddingBundle& e2, GeneratorOracle& oracle,
                                    std::uint64_t seed) {
    if (!e1.same_shape(e2)) throw Error(ErrorCode::ShapeMismatch, "bundles to fuse differ in shape");
    const std::size_t w = e1.cols();
    if (w > kBruteForceMaxWidth) {
        throw Error(ErrorCode::WidthTooLarge, "brute force is limited to w <= 16, got " + std::to_string(w));
    }
    const auto refs = make_references(e1, e2, oracle, seed);

    BruteForceResult best{ExchangeVector::zeros(w), std::numeric_limits<double>::infinity()};
    const std::uint64_t count = std::uint64_t{1} << w;
    std::vector<std::uint8_t> bits(w);
    for (std::uint64_t value = 0; value < count; ++value) {
        for (std::size_t j = 0; j < w; ++j) bits[j] = static_cast<std::uint8_t>((value >> j) & 1U);
        ExchangeVector f(bits);
        const auto fused = oracle.generate(swap(e1, e2, f), seed);
        const double abs_s = std::abs(balance_score(fused.feature, refs.first.feature, refs.second.feature).s);
        if (abs_s < best.min_abs_s) best = {std::move(f), abs_s};
    }
    return best;
}

nlohmann::json record_to_json(const IterationRecord& record) {
    auto flipped = nlohmann::json::array();
    for (auto i : record.flipped) flipped.push_back(i + 1);
    return {
        {"t", record.t},
        {"s", record.score.s},
        {"d1", record.score.d1},
        {"d2", record.score.d2},
        {"l", record.group_size},
        {"flipped", flipped},
        {"sign_flip", record.sign_flip},
        {"hamming_weight", record.f.hamming_weight()},
    };
}

nlohmann::json summary_to_json(const FusionResult& result) {
    nlohmann::json j = {
        {"converged", result.converged},
        {"stop_reason", to_string(result.stop_reason)},
        {"iterations", result.iterations()},
        {"best_t", result.best_t},
        {"best_abs_s", result.trace.empty() ? nlohmann::json(nullptr) : nlohmann::json(result.best_abs_s)},
        {"s", result.best_score.s},
        {"d1", result.best_score.d1},
        {"d2", result.best_score.d2},
        {"avg_sim", result.metrics.avg_sim},
        {"balance", result.metrics.balance},
        {"final_f", to_json(result.final_f)},
        {"best_f", to_json(result.best_f)},
    };
    if (!result.ref1_image_id.empty() || !result.best_image_id.empty()) {
        j["image_ids"] = {
            {"ref1", result.ref1_image_id},
            {"ref2", result.ref2_image_id},
            {"fused", result.best_image_id},
        };
    }
    return j;
}

void write_trace(std::ostream& out, const FusionResult& result) {
    for (const auto& record : result.trace) out << record_to_json(record).dump() << '\n';
    out << nlohmann::json{{"summary", summary_to_json(result)}}.dump() << '\n';
}

}  // namespace agswap
