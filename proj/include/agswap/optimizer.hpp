// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agswap/embedding.hpp"
#include "agswap/errors.hpp"
#include "agswap/metrics.hpp"
#include "agswap/oracle.hpp"
#include "agswap/random.hpp"

namespace agswap {

struct OptimizerParams {
    double epsilon = 0.01;
    std::size_t l_init = 10;
    std::size_t delta_l = 2;
    std::size_t l_min = 2;
    std::size_t flip_threshold = 4;
    std::size_t max_iters = 500;
    std::uint64_t rng_seed = 0;
    std::optional<BiasSpec> bias;
    // s > 0 flips zeros to ones, the literal reading of the update rule when
    // d is a distance. Off by default; with cosine similarity it drives |s| up.
    bool literal_direction = false;
    // Regenerate both reference features every iteration with that
    // iteration's seed instead of once up front.
    bool refresh_refs_each_iter = false;

    // Throws InvalidArgument unless l_min <= l_init, delta_l >= 1, epsilon > 0.
    void validate() const;
};

struct IterationRecord {
    std::size_t t = 0;
    ExchangeVector f;
    BalanceScore score;
    // Group size in effect for the update that follows this record.
    std::size_t group_size = 0;
    // 0-based positions flipped to produce f^{t+1}; empty on the last record.
    std::vector<std::size_t> flipped;
    bool sign_flip = false;
};

enum class StopReason { Converged, MaxIterations, BiasUnresolvable, OracleFailure };

const char* to_string(StopReason reason) noexcept;

struct FusionResult {
    ExchangeVector final_f;
    ExchangeVector best_f;
    double best_abs_s = 0.0;
    std::size_t best_t = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::MaxIterations;
    std::vector<IterationRecord> trace;
    // Unbiased cosine metrics of the best vector's output.
    EvalMetrics metrics;
    BalanceScore best_score;
    // Image handles of the two references and the best fused output, when the
    // oracle reports them.
    std::string ref1_image_id;
    std::string ref2_image_id;
    std::string best_image_id;

    [[nodiscard]] std::size_t iterations() const noexcept { return trace.size(); }
};

/// Oracle failure in the middle of a run; carries everything recorded so far.
class FusionInterrupted : public OracleFailure {
public:
    FusionInterrupted(const OracleFailure& cause, std::shared_ptr<const FusionResult> partial)
        : OracleFailure(cause), partial_(std::move(partial)) {}

    [[nodiscard]] const std::shared_ptr<const FusionResult>& partial() const noexcept { return partial_; }

private:
    std::shared_ptr<const FusionResult> partial_;
};

struct UpdateStep {
    ExchangeVector f;
    std::vector<std::size_t> flipped;
};

/// One adaptive group update. s > 0 (output leans to concept 1) turns
/// min(l, #ones) random ones into zeros; s < 0 turns min(l, #zeros) random
/// zeros into ones. `literal_direction` swaps the two cases.
/// Throws BiasUnresolvable when the side to draw from is empty.
UpdateStep update_vector(const ExchangeVector& f, double s, std::size_t l, SplitMix64& rng,
                         bool literal_direction = false);

struct ScheduleState {
    std::size_t group_size = 0;
    std::size_t flip_count = 0;

    friend bool operator==(const ScheduleState&, const ScheduleState&) = default;
};

/// After flip_threshold sign flips the group shrinks by delta_l; dropping
/// below l_min resets it to l_init. The flip counter restarts on every change.
ScheduleState schedule_size(std::size_t current_l, std::size_t flip_count, const OptimizerParams& params);

/// The adaptive group swapping search. Halts after at most
/// params.max_iters fused generations plus the two reference generations
/// (more when refresh_refs_each_iter is set).
FusionResult run_fusion(const EmbeddingBundle& e1, const EmbeddingBundle& e2, GeneratorOracle& oracle,
                        const OptimizerParams& params);

struct BruteForceResult {
    ExchangeVector f_opt;
    double min_abs_s = 0.0;
};

inline constexpr std::size_t kBruteForceMaxWidth = 16;

/// Exhaustive minimum of |s| over all 2^w exchange vectors (w <= 16). Ties go
/// to the smallest binary value, bit j-1 being f_j.
BruteForceResult brute_force_search(const EmbeddingBundle& e1, const EmbeddingBundle& e2, GeneratorOracle& oracle,
                                    std::uint64_t seed = 0);

// Trace file: one JSON object per record, then {"summary": {...}}.
nlohmann::json record_to_json(const IterationRecord& record);
nlohmann::json summary_to_json(const FusionResult& result);
void write_trace(std::ostream& out, const FusionResult& result);

}  // namespace agswap
