// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

// agswap: command-line front end over the C interface.
//
//   agswap fuse dog stove --out run/
//   agswap batch pairs.csv --out run/
//   agswap cof build --edges edges.tsv --leaves leaves.txt --keep keep.txt --out manifest.json
//   agswap cof tiny --manifest manifest.json --out tiny.csv
//   agswap cof pairs --manifest manifest.json --mode all --out pairs.csv
//
// Exit codes: 0 ok, 2 operational failure, 3 search did not converge.

#include <agswap/agswap.h>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 2;
constexpr int kExitNotConverged = 3;

struct OracleFlags {
    std::string kind = "synthetic";
    std::string url;
    agswap_synthetic_spec synthetic{};
    std::string nonlinearity = "linear";
};

struct SearchFlags {
    agswap_params params{};
    std::optional<double> bias_left;
    std::optional<double> bias_right;
    std::string style;
    std::string prompt_template;
};

struct OracleDeleter {
    void operator()(agswap_oracle* o) const { agswap_oracle_destroy(o); }
};
struct ResultDeleter {
    void operator()(agswap_result* r) const { agswap_result_destroy(r); }
};
using OraclePtr = std::unique_ptr<agswap_oracle, OracleDeleter>;
using ResultPtr = std::unique_ptr<agswap_result, ResultDeleter>;

int report(agswap_status status, const char* what) {
    std::fprintf(stderr, "agswap: %s failed: %s: %s\n", what, agswap_status_name(status), agswap_last_error());
    return kExitFailure;
}

void add_oracle_flags(CLI::App* cmd, OracleFlags& flags) {
    agswap_synthetic_spec_init(&flags.synthetic);
    cmd->add_option("--oracle", flags.kind, "Oracle backend")
        ->check(CLI::IsMember({"synthetic", "remote"}))
        ->capture_default_str();
    cmd->add_option("--url", flags.url, "Oracle service base URL")->envname("AGSWAP_ORACLE_URL");
    auto* group = cmd->add_option_group("synthetic oracle");
    group->add_option("--oracle-seed", flags.synthetic.seed, "Projection seed")->capture_default_str();
    group->add_option("--feature-dim", flags.synthetic.k, "Feature dimension k")->capture_default_str();
    group->add_option("--rows", flags.synthetic.h, "Embedding rows h")->capture_default_str();
    group->add_option("--tokens", flags.synthetic.w, "Token columns w")->capture_default_str();
    group->add_option("--pooled-dim", flags.synthetic.q, "Pooled vector length q")->capture_default_str();
    group->add_option("--nonlinearity", flags.nonlinearity)
        ->check(CLI::IsMember({"linear", "tanh"}))
        ->capture_default_str();
}

void add_search_flags(CLI::App* cmd, SearchFlags& flags) {
    agswap_params_init(&flags.params);
    auto& p = flags.params;
    cmd->add_option("--seed", p.rng_seed, "Seed for all randomness")->capture_default_str();
    cmd->add_option("--epsilon", p.epsilon, "Convergence threshold on |s|")->capture_default_str();
    cmd->add_option("--l-init", p.l_init, "Initial group size")->capture_default_str();
    cmd->add_option("--delta-l", p.delta_l, "Group size decrement")->capture_default_str();
    cmd->add_option("--l-min", p.l_min, "Smallest group size before reset")->capture_default_str();
    cmd->add_option("--flip-threshold", p.flip_threshold, "Sign flips before shrinking")->capture_default_str();
    cmd->add_option("--max-iters", p.max_iters, "Iteration budget")->capture_default_str();
    cmd->add_option("--bias-left", flags.bias_left, "Bias weight toward the first concept");
    cmd->add_option("--bias-right", flags.bias_right, "Bias weight toward the second concept");
    cmd->add_option("--s-beta", p.s_beta, "Bias step")->capture_default_str();
    auto* style = cmd->add_option("--style", flags.style, "Prompt style, giving \"A <style> of <concept>\"");
    cmd->add_option("--template", flags.prompt_template, "Prompt template with one {} slot")->excludes(style);
    cmd->add_flag("--refresh-refs", p.refresh_refs_each_iter, "Regenerate reference images every iteration");
}

int make_oracle(const OracleFlags& flags, OraclePtr& out) {
    agswap_oracle* raw = nullptr;
    agswap_status st;
    if (flags.kind == "remote") {
        if (flags.url.empty()) {
            std::fprintf(stderr, "agswap: --oracle remote needs --url or AGSWAP_ORACLE_URL\n");
            return kExitFailure;
        }
        st = agswap_oracle_create_remote(flags.url.c_str(), &raw);
    } else {
        auto spec = flags.synthetic;
        spec.nonlinearity = flags.nonlinearity == "tanh" ? AGSWAP_TANH : AGSWAP_LINEAR;
        st = agswap_oracle_create_synthetic(&spec, &raw);
    }
    if (st != AGSWAP_OK) return report(st, "oracle setup");
    out.reset(raw);
    return kExitOk;
}

std::string resolve_template(const SearchFlags& flags) {
    if (!flags.prompt_template.empty()) return flags.prompt_template;
    if (!flags.style.empty()) return "A " + flags.style + " of {}";
    return "A photo of {}";
}

agswap_params resolve_params(const SearchFlags& flags) {
    auto p = flags.params;
    if (flags.bias_left || flags.bias_right) {
        p.use_bias = 1;
        p.alpha_left = flags.bias_left.value_or(0.0);
        p.alpha_right = flags.bias_right.value_or(0.0);
    }
    return p;
}

bool ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::fprintf(stderr, "agswap: cannot create %s: %s\n", dir.c_str(), ec.message().c_str());
        return false;
    }
    return true;
}

int write_artifacts(const agswap_result* result, const std::string& dir) {
    const auto trace = (fs::path(dir) / "trace.jsonl").string();
    const auto summary = (fs::path(dir) / "result.json").string();
    if (auto st = agswap_result_write_trace(result, trace.c_str()); st != AGSWAP_OK) return report(st, "trace");
    if (auto st = agswap_result_write_json(result, summary.c_str()); st != AGSWAP_OK) return report(st, "result");
    return kExitOk;
}

int cmd_fuse(const std::string& c1, const std::string& c2, const OracleFlags& oflags, const SearchFlags& sflags,
             const std::string& out_dir) {
    OraclePtr oracle;
    if (int rc = make_oracle(oflags, oracle); rc != kExitOk) return rc;
    if (!ensure_dir(out_dir)) return kExitFailure;

    const auto tmpl = resolve_template(sflags);
    const auto params = resolve_params(sflags);
    agswap_result* raw = nullptr;
    const auto st = agswap_fuse_concepts(oracle.get(), c1.c_str(), c2.c_str(), tmpl.c_str(), &params, &raw);
    ResultPtr result(raw);
    if (st != AGSWAP_OK) {
        if (result) write_artifacts(result.get(), out_dir);
        return report(st, "fuse");
    }
    if (int rc = write_artifacts(result.get(), out_dir); rc != kExitOk) return rc;

    agswap_summary s{};
    agswap_result_summary(result.get(), &s);
    std::printf("s=%.6f d1=%.6f d2=%.6f iterations=%zu converged=%s\n", s.s, s.d1, s.d2, s.iterations,
                s.converged ? "true" : "false");
    return s.converged ? kExitOk : kExitNotConverged;
}

int cmd_batch(const std::string& pairs_csv, const OracleFlags& oflags, const SearchFlags& sflags,
              const std::string& out_dir) {
    OraclePtr oracle;
    if (int rc = make_oracle(oflags, oracle); rc != kExitOk) return rc;
    if (!ensure_dir(out_dir)) return kExitFailure;

    const auto tmpl = resolve_template(sflags);
    const auto params = resolve_params(sflags);
    const auto out_csv = (fs::path(out_dir) / "batch_metrics.csv").string();
    agswap_batch_summary s{};
    const auto st = agswap_batch_run(oracle.get(), pairs_csv.c_str(), tmpl.c_str(), &params, out_csv.c_str(), &s);
    if (st != AGSWAP_OK) return report(st, "batch");

    std::printf("pairs=%zu ok=%zu converged=%zu mean_iters=%.3f avg_sim=%.6f balance=%.6f\n", s.pairs, s.succeeded,
                s.converged, s.mean_iters, s.mean_avg_sim, s.mean_balance);
    return s.succeeded == 0 ? kExitFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive group swapping for text-to-image concept fusion"};
    app.set_version_flag("--version", std::string(agswap_version()));
    app.require_subcommand(1);

    // fuse
    auto* fuse = app.add_subcommand("fuse", "Fuse two concepts");
    std::string c1, c2, fuse_out = ".";
    OracleFlags fuse_oracle;
    SearchFlags fuse_search;
    fuse->add_option("concept1", c1)->required();
    fuse->add_option("concept2", c2)->required();
    fuse->add_option("--out", fuse_out, "Directory for trace.jsonl and result.json")->capture_default_str();
    add_oracle_flags(fuse, fuse_oracle);
    add_search_flags(fuse, fuse_search);

    // batch
    auto* batch = app.add_subcommand("batch", "Fuse every pair of a left,right CSV");
    std::string pairs_csv, batch_out = ".";
    OracleFlags batch_oracle;
    SearchFlags batch_search;
    batch->add_option("pairs", pairs_csv)->required()->check(CLI::ExistingFile);
    batch->add_option("--out", batch_out, "Directory for batch_metrics.csv")->capture_default_str();
    add_oracle_flags(batch, batch_oracle);
    add_search_flags(batch, batch_search);

    // cof
    auto* cof = app.add_subcommand("cof", "Build the category dataset");
    cof->require_subcommand(1);

    auto* build = cof->add_subcommand("build", "Taxonomy files to manifest");
    std::string edges, leaves, keep, remove, root = "object", manifest_out = "manifest.json", warnings_out;
    std::uint64_t build_seed = 0;
    std::size_t per_class = 10;
    build->add_option("--edges", edges, "child<TAB>parent hypernym edges")->required()->check(CLI::ExistingFile);
    build->add_option("--leaves", leaves, "Leaf categories, one per line")->required()->check(CLI::ExistingFile);
    build->add_option("--keep", keep, "Superclass keep list")->check(CLI::ExistingFile);
    build->add_option("--delete", remove, "Superclass delete list")->check(CLI::ExistingFile);
    build->add_option("--root", root)->capture_default_str();
    build->add_option("--seed", build_seed)->capture_default_str();
    build->add_option("--per-class", per_class, "Subclasses per superclass")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    build->add_option("--out", manifest_out)->capture_default_str();
    build->add_option("--warnings", warnings_out, "Write curation warnings to this file");

    auto* tiny = cof->add_subcommand("tiny", "One subclass per superclass");
    std::string tiny_manifest, tiny_out = "tiny.csv";
    std::uint64_t tiny_seed = 0;
    tiny->add_option("--manifest", tiny_manifest)->required()->check(CLI::ExistingFile);
    tiny->add_option("--seed", tiny_seed)->capture_default_str();
    tiny->add_option("--out", tiny_out)->capture_default_str();

    auto* pairs = cof->add_subcommand("pairs", "Enumerate fusion pairs");
    std::string pairs_manifest, pairs_mode = "all", pairs_out = "pairs.csv";
    std::uint64_t pairs_seed = 0;
    pairs->add_option("--manifest", pairs_manifest)->required()->check(CLI::ExistingFile);
    pairs->add_option("--mode", pairs_mode)->check(CLI::IsMember({"all", "tiny"}))->capture_default_str();
    pairs->add_option("--seed", pairs_seed)->capture_default_str();
    pairs->add_option("--out", pairs_out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitFailure;
    }

    if (fuse->parsed()) return cmd_fuse(c1, c2, fuse_oracle, fuse_search, fuse_out);
    if (batch->parsed()) return cmd_batch(pairs_csv, batch_oracle, batch_search, batch_out);

    if (build->parsed()) {
        agswap_cof_build_options opts{};
        opts.edges_tsv = edges.c_str();
        opts.leaves_txt = leaves.c_str();
        opts.keep_txt = keep.empty() ? nullptr : keep.c_str();
        opts.delete_txt = remove.empty() ? nullptr : remove.c_str();
        opts.root = root.c_str();
        opts.seed = build_seed;
        opts.per_class = per_class;
        agswap_cof_report rep{};
        const auto st = agswap_cof_build(&opts, manifest_out.c_str(),
                                         warnings_out.empty() ? nullptr : warnings_out.c_str(), &rep);
        if (st != AGSWAP_OK) return report(st, "cof build");
        std::printf("candidates=%zu curated=%zu superclasses=%zu categories=%zu warnings=%zu\n",
                    rep.candidate_count, rep.curated_count, rep.superclass_count, rep.category_count,
                    rep.warning_count);
        return kExitOk;
    }
    if (tiny->parsed()) {
        std::size_t n = 0;
        const auto st = agswap_cof_tiny(tiny_manifest.c_str(), tiny_seed, tiny_out.c_str(), &n);
        if (st != AGSWAP_OK) return report(st, "cof tiny");
        std::printf("categories=%zu\n", n);
        return kExitOk;
    }
    if (pairs->parsed()) {
        std::size_t n = 0;
        const auto mode = pairs_mode == "tiny" ? AGSWAP_PAIRS_TINY : AGSWAP_PAIRS_ALL;
        const auto st = agswap_cof_pairs(pairs_manifest.c_str(), mode, pairs_seed, pairs_out.c_str(), &n);
        if (st != AGSWAP_OK) return report(st, "cof pairs");
        std::printf("pairs=%zu\n", n);
        return kExitOk;
    }
    return kExitFailure;
}
