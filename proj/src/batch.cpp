// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/batch.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <ostream>
#include <thread>

#include "agswap/errors.hpp"
#include "agswap/random.hpp"

namespace agswap {

namespace {

std::size_t count_slots(std::string_view pattern) {
    std::size_t count = 0;
    for (auto pos = pattern.find("{}"); pos != std::string_view::npos; pos = pattern.find("{}", pos + 2)) ++count;
    return count;
}

std::string shortest(double value) {
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return ec == std::errc{} ? std::string(buffer, end) : std::string("nan");
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

PromptTemplate::PromptTemplate(std::string pattern) : pattern_(std::move(pattern)) {
    if (count_slots(pattern_) != 1) {
        throw Error(ErrorCode::InvalidArgument, "prompt template '" + pattern_ + "' must contain exactly one {}");
    }
}

PromptTemplate PromptTemplate::with_style(std::string_view style) {
    if (style.empty()) return PromptTemplate();
    return PromptTemplate("A " + std::string(style) + " of {}");
}

std::string PromptTemplate::format(std::string_view concept_name) const {
    std::string out = pattern_;
    out.replace(out.find("{}"), 2, concept_name);
    return out;
}

std::string concept_text(std::string_view category) {
    std::string out(category);
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

std::uint64_t pair_seed(std::uint64_t seed, std::string_view left, std::string_view right) {
    std::string key(left);
    key += '\x1f';
    key += right;
    return derive_seed(seed, key);
}

ConceptFusion fuse_concepts(GeneratorOracle& oracle, std::string_view c1, std::string_view c2,
                            const PromptTemplate& prompt, const OptimizerParams& params) {
    auto e1 = oracle.encode(prompt.format(concept_text(c1)), params.rng_seed);
    auto e2 = oracle.encode(prompt.format(concept_text(c2)), params.rng_seed);
    auto result = run_fusion(e1, e2, oracle, params);
    return {std::move(e1), std::move(e2), std::move(result)};
}

std::vector<BatchRow> run_batch(GeneratorOracle& oracle, const std::vector<cof::CategoryPair>& pairs,
                                const PromptTemplate& prompt, const OptimizerParams& params,
                                std::size_t max_workers) {
    std::vector<BatchRow> rows(pairs.size());
    if (pairs.empty()) return rows;

    std::size_t workers = std::max<std::size_t>(1, oracle.health().max_concurrency);
    if (max_workers != 0) workers = std::min(workers, max_workers);
    workers = std::min(workers, pairs.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
            const auto& [left, right] = pairs[i];
            BatchRow& row = rows[i];
            row.left = left;
            row.right = right;
            try {
                auto p = params;
                p.rng_seed = pair_seed(params.rng_seed, left, right);
                const auto fused = fuse_concepts(oracle, left, right, prompt, p);
                row.ok = true;
                row.converged = fused.result.converged;
                row.iters = fused.result.iterations();
                row.final_s = fused.result.best_score.s;
                row.avg_sim = fused.result.metrics.avg_sim;
                row.balance = fused.result.metrics.balance;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(work);
        work();
    }
    return rows;
}

BatchSummary summarize(const std::vector<BatchRow>& rows) {
    BatchSummary s;
    s.pairs = rows.size();
    for (const auto& row : rows) {
        if (!row.ok) continue;
        ++s.succeeded;
        s.converged += row.converged ? 1 : 0;
        s.mean_iters += static_cast<double>(row.iters);
        s.mean_final_s += row.final_s;
        s.mean_avg_sim += row.avg_sim;
        s.mean_balance += row.balance;
    }
    if (s.succeeded > 0) {
        const double n = static_cast<double>(s.succeeded);
        s.mean_converged = static_cast<double>(s.converged) / n;
        s.mean_iters /= n;
        s.mean_final_s /= n;
        s.mean_avg_sim /= n;
        s.mean_balance /= n;
    }
    return s;
}

void write_batch_csv(std::ostream& out, const std::vector<BatchRow>& rows) {
    out << "left,right,converged,iters,final_s,avg_sim,balance,status\n";
    for (const auto& row : rows) {
        out << csv_field(row.left) << ',' << csv_field(row.right) << ',';
        if (row.ok) {
            out << (row.converged ? 1 : 0) << ',' << row.iters << ',' << shortest(row.final_s) << ','
                << shortest(row.avg_sim) << ',' << shortest(row.balance) << ",ok\n";
        } else {
            out << ",,,,," << csv_field("error: " + row.error) << '\n';
        }
    }
    const auto s = summarize(rows);
    out << "mean,," << shortest(s.mean_converged) << ',' << shortest(s.mean_iters) << ','
        << shortest(s.mean_final_s) << ',' << shortest(s.mean_avg_sim) << ',' << shortest(s.mean_balance) << ','
        << s.succeeded << '/' << s.pairs << " ok\n";
}

}  // namespace agswap
