// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "agswap/optimizer.hpp"
#include "agswap/oracle.hpp"
#include "agswap/taxonomy.hpp"

namespace agswap {

/// Prompt pattern with exactly one "{}" slot for the concept.
class PromptTemplate {
public:
    static constexpr std::string_view kDefault = "A photo of {}";

    explicit PromptTemplate(std::string pattern = std::string(kDefault));
    // "A {style} of {}"
    static PromptTemplate with_style(std::string_view style);

    [[nodiscard]] std::string format(std::string_view concept_name) const;
    [[nodiscard]] const std::string& pattern() const noexcept { return pattern_; }

private:
    std::string pattern_;
};

// Category names use underscores; prompts use spaces.
std::string concept_text(std::string_view category);

// Per-pair seed for batch runs.
std::uint64_t pair_seed(std::uint64_t seed, std::string_view left, std::string_view right);

struct ConceptFusion {
    EmbeddingBundle e1;
    EmbeddingBundle e2;
    FusionResult result;
};

/// Encodes both prompts through the oracle and runs the search.
ConceptFusion fuse_concepts(GeneratorOracle& oracle, std::string_view c1, std::string_view c2,
                            const PromptTemplate& prompt, const OptimizerParams& params);

struct BatchRow {
    std::string left;
    std::string right;
    bool ok = false;
    std::string error;
    bool converged = false;
    std::size_t iters = 0;
    double final_s = 0.0;
    double avg_sim = 0.0;
    double balance = 0.0;
};

struct BatchSummary {
    std::size_t pairs = 0;
    std::size_t succeeded = 0;
    std::size_t converged = 0;
    double mean_converged = 0.0;
    double mean_iters = 0.0;
    double mean_final_s = 0.0;
    double mean_avg_sim = 0.0;
    double mean_balance = 0.0;
};

/// Fuses every pair, running up to the oracle's max_concurrency pairs at a
/// time (and at most `max_workers` when nonzero). Each pair's seed is
/// pair_seed(params.rng_seed, left, right). Failures are recorded in their
/// row; the batch never stops early. Rows come back in input order.
std::vector<BatchRow> run_batch(GeneratorOracle& oracle, const std::vector<cof::CategoryPair>& pairs,
                                const PromptTemplate& prompt, const OptimizerParams& params,
                                std::size_t max_workers = 0);

// Means over the successful rows.
BatchSummary summarize(const std::vector<BatchRow>& rows);

/// left,right,converged,iters,final_s,avg_sim,balance,status plus a final
/// "mean" row. Doubles are printed in shortest round-trip form.
void write_batch_csv(std::ostream& out, const std::vector<BatchRow>& rows);

}  // namespace agswap
