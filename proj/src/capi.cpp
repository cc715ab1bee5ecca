// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/agswap.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "agswap/batch.hpp"
#include "agswap/embedding.hpp"
#include "agswap/errors.hpp"
#include "agswap/optimizer.hpp"
#include "agswap/remote_oracle.hpp"
#include "agswap/synthetic_oracle.hpp"
#include "agswap/taxonomy.hpp"

struct agswap_bundle {
    agswap::EmbeddingBundle value;
};

struct agswap_oracle {
    std::unique_ptr<agswap::GeneratorOracle> impl;
};

struct agswap_result {
    agswap::FusionResult value;
};

namespace {

using agswap::Error;
using agswap::ErrorCode;

thread_local std::string g_last_error;

agswap_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return AGSWAP_E_INVALID_ARGUMENT;
        case ErrorCode::ShapeMismatch: return AGSWAP_E_SHAPE_MISMATCH;
        case ErrorCode::InvalidWidth: return AGSWAP_E_INVALID_WIDTH;
        case ErrorCode::IndexOutOfBounds: return AGSWAP_E_INDEX_OUT_OF_BOUNDS;
        case ErrorCode::LengthMismatch: return AGSWAP_E_LENGTH_MISMATCH;
        case ErrorCode::NotUnitNorm: return AGSWAP_E_NOT_UNIT_NORM;
        case ErrorCode::NonFinite: return AGSWAP_E_NON_FINITE;
        case ErrorCode::BiasUnresolvable: return AGSWAP_E_BIAS_UNRESOLVABLE;
        case ErrorCode::WidthTooLarge: return AGSWAP_E_WIDTH_TOO_LARGE;
        case ErrorCode::OracleFailure: return AGSWAP_E_ORACLE_FAILURE;
        case ErrorCode::ProtocolError: return AGSWAP_E_PROTOCOL;
        case ErrorCode::UnknownCategory: return AGSWAP_E_UNKNOWN_CATEGORY;
        case ErrorCode::NoPathToRoot: return AGSWAP_E_NO_PATH_TO_ROOT;
        case ErrorCode::ConflictingLists: return AGSWAP_E_CONFLICTING_LISTS;
        case ErrorCode::InsufficientHyponyms: return AGSWAP_E_INSUFFICIENT_HYPONYMS;
        case ErrorCode::InvalidGraph: return AGSWAP_E_INVALID_GRAPH;
        case ErrorCode::Io: return AGSWAP_E_IO;
    }
    return AGSWAP_E_INTERNAL;
}

template <class Fn>
agswap_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return AGSWAP_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return AGSWAP_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown exception";
        return AGSWAP_E_INTERNAL;
    }
}

template <class T>
T& require(T* p, const char* what) {
    if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
    return *p;
}

const char* require_str(const char* s, const char* what) {
    if (!s) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
    return s;
}

agswap::ExchangeVector vector_from(const uint8_t* bits, size_t width) {
    require(bits, "bits");
    std::vector<std::uint8_t> v(bits, bits + width);
    return agswap::ExchangeVector(std::move(v));
}

void copy_vector(const agswap::ExchangeVector& f, uint8_t* bits, size_t width) {
    require(bits, "bits");
    if (width != f.width()) {
        throw Error(ErrorCode::LengthMismatch, "buffer holds " + std::to_string(width) + " entries, vector has " +
                                                   std::to_string(f.width()));
    }
    std::copy(f.bits().begin(), f.bits().end(), bits);
}

agswap::OptimizerParams to_params(const agswap_params* in) {
    agswap::OptimizerParams p;
    if (!in) return p;
    p.epsilon = in->epsilon;
    p.l_init = in->l_init;
    p.delta_l = in->delta_l;
    p.l_min = in->l_min;
    p.flip_threshold = in->flip_threshold;
    p.max_iters = in->max_iters;
    p.rng_seed = in->rng_seed;
    if (in->use_bias) p.bias = agswap::BiasSpec{in->alpha_left, in->alpha_right, in->s_beta};
    p.literal_direction = in->literal_direction != 0;
    p.refresh_refs_each_iter = in->refresh_refs_each_iter != 0;
    return p;
}

std::ofstream open_output(const char* path) {
    std::ofstream out(require_str(path, "path"), std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, std::string("cannot write ") + path);
    return out;
}

// Runs `fn` producing a FusionResult; a mid-run oracle failure still hands
// the partial result to the caller.
template <class Fn>
agswap_status fuse_into(agswap_result** out, Fn&& fn) {
    require(out, "out");
    *out = nullptr;
    return guarded([&] {
        try {
            *out = new agswap_result{fn()};
        } catch (const agswap::FusionInterrupted& e) {
            if (e.partial() && !e.partial()->trace.empty()) *out = new agswap_result{*e.partial()};
            throw;
        }
    });
}

}  // namespace

extern "C" {

const char* agswap_version(void) { return "1.0.0"; }

const char* agswap_last_error(void) { return g_last_error.c_str(); }

const char* agswap_status_name(agswap_status status) {
    switch (status) {
        case AGSWAP_OK: return "OK";
        case AGSWAP_E_INTERNAL: return "Internal";
        default: break;
    }
    for (int c = 0; c <= static_cast<int>(ErrorCode::Io); ++c) {
        if (to_status(static_cast<ErrorCode>(c)) == status) return agswap::to_string(static_cast<ErrorCode>(c));
    }
    return "Unknown";
}

agswap_status agswap_bundle_create(const char* label, size_t h, size_t w, const double* base, const double* pooled,
                                   size_t q, agswap_bundle** out) {
    return guarded([&] {
        require(out, "out");
        require(base, "base");
        if (q > 0) require(pooled, "pooled");
        std::vector<double> b(base, base + h * w);
        std::vector<double> p = q > 0 ? std::vector<double>(pooled, pooled + q) : std::vector<double>{};
        *out = new agswap_bundle{agswap::EmbeddingBundle(label ? label : "", h, w, std::move(b), std::move(p))};
    });
}

agswap_status agswap_bundle_from_json(const char* json, agswap_bundle** out) {
    return guarded([&] {
        require(out, "out");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(require_str(json, "json"));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::ProtocolError, e.what());
        }
        *out = new agswap_bundle{agswap::bundle_from_json(j)};
    });
}

agswap_status agswap_bundle_to_json(const agswap_bundle* bundle, char* buf, size_t buf_size, size_t* needed) {
    return guarded([&] {
        const auto text = agswap::to_json(require(bundle, "bundle").value).dump();
        if (needed) *needed = text.size() + 1;
        if (!buf) return;
        if (buf_size < text.size() + 1) throw Error(ErrorCode::LengthMismatch, "buffer too small for bundle JSON");
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

agswap_status agswap_bundle_dims(const agswap_bundle* bundle, size_t* h, size_t* w, size_t* q) {
    return guarded([&] {
        const auto& b = require(bundle, "bundle").value;
        if (h) *h = b.rows();
        if (w) *w = b.cols();
        if (q) *q = b.pooled().size();
    });
}

agswap_status agswap_bundle_swap(const agswap_bundle* e1, const agswap_bundle* e2, const uint8_t* bits, size_t width,
                                 agswap_bundle** out) {
    return guarded([&] {
        require(out, "out");
        *out = new agswap_bundle{
            agswap::swap(require(e1, "e1").value, require(e2, "e2").value, vector_from(bits, width))};
    });
}

void agswap_bundle_destroy(agswap_bundle* bundle) { delete bundle; }

agswap_status agswap_exchange_vector_init(size_t width, uint64_t seed, uint8_t* bits_out) {
    return guarded([&] { copy_vector(agswap::init_exchange_vector(width, seed), bits_out, width); });
}

void agswap_synthetic_spec_init(agswap_synthetic_spec* spec) {
    if (!spec) return;
    const agswap::SyntheticOracleSpec d;
    spec->seed = d.seed;
    spec->k = d.k;
    spec->nonlinearity = AGSWAP_LINEAR;
    spec->h = d.h;
    spec->w = d.w;
    spec->q = d.q;
}

agswap_status agswap_oracle_create_synthetic(const agswap_synthetic_spec* spec, agswap_oracle** out) {
    return guarded([&] {
        require(out, "out");
        const auto& s = require(spec, "spec");
        agswap::SyntheticOracleSpec cpp;
        cpp.seed = s.seed;
        cpp.k = s.k;
        cpp.nonlinearity = s.nonlinearity == AGSWAP_TANH ? agswap::Nonlinearity::Tanh : agswap::Nonlinearity::Linear;
        cpp.h = s.h;
        cpp.w = s.w;
        cpp.q = s.q;
        *out = new agswap_oracle{std::make_unique<agswap::SyntheticOracle>(cpp)};
    });
}

agswap_status agswap_oracle_create_remote(const char* base_url, agswap_oracle** out) {
    return guarded([&] {
        require(out, "out");
        agswap::RemoteOracleOptions options;
        options.base_url = require_str(base_url, "base_url");
        *out = new agswap_oracle{std::make_unique<agswap::RemoteOracle>(std::move(options))};
    });
}

agswap_status agswap_oracle_health(agswap_oracle* oracle, agswap_capabilities* out) {
    return guarded([&] {
        auto& o = require(oracle, "oracle");
        auto& c = require(out, "out");
        const auto caps = o.impl->health();
        c.feature_dim = caps.feature_dim;
        c.h = caps.h;
        c.w = caps.w;
        c.q = caps.q;
        c.deterministic = caps.deterministic ? 1 : 0;
        c.max_concurrency = caps.max_concurrency;
        std::memset(c.model, 0, sizeof(c.model));
        std::strncpy(c.model, caps.model.c_str(), sizeof(c.model) - 1);
    });
}

agswap_status agswap_oracle_encode(agswap_oracle* oracle, const char* prompt, uint64_t seed, agswap_bundle** out) {
    return guarded([&] {
        require(out, "out");
        *out = new agswap_bundle{require(oracle, "oracle").impl->encode(require_str(prompt, "prompt"), seed)};
    });
}

agswap_status agswap_oracle_generate(agswap_oracle* oracle, const agswap_bundle* bundle, uint64_t seed,
                                     double* feature, size_t feature_len) {
    return guarded([&] {
        require(feature, "feature");
        const auto g = require(oracle, "oracle").impl->generate(require(bundle, "bundle").value, seed);
        if (g.feature.size() != feature_len) {
            throw Error(ErrorCode::LengthMismatch, "feature has " + std::to_string(g.feature.size()) +
                                                       " entries, buffer holds " + std::to_string(feature_len));
        }
        std::copy(g.feature.vec().begin(), g.feature.vec().end(), feature);
    });
}

void agswap_oracle_destroy(agswap_oracle* oracle) { delete oracle; }

void agswap_params_init(agswap_params* params) {
    if (!params) return;
    const agswap::OptimizerParams d;
    params->epsilon = d.epsilon;
    params->l_init = d.l_init;
    params->delta_l = d.delta_l;
    params->l_min = d.l_min;
    params->flip_threshold = d.flip_threshold;
    params->max_iters = d.max_iters;
    params->rng_seed = d.rng_seed;
    params->use_bias = 0;
    params->alpha_left = 0.0;
    params->alpha_right = 0.0;
    params->s_beta = agswap::BiasSpec{}.s_beta;
    params->literal_direction = 0;
    params->refresh_refs_each_iter = 0;
}

agswap_status agswap_fuse(agswap_oracle* oracle, const agswap_bundle* e1, const agswap_bundle* e2,
                          const agswap_params* params, agswap_result** out) {
    return fuse_into(out, [&] {
        return agswap::run_fusion(require(e1, "e1").value, require(e2, "e2").value, *require(oracle, "oracle").impl,
                                  to_params(params));
    });
}

agswap_status agswap_fuse_concepts(agswap_oracle* oracle, const char* c1, const char* c2,
                                   const char* prompt_template, const agswap_params* params, agswap_result** out) {
    return fuse_into(out, [&] {
        const agswap::PromptTemplate prompt(prompt_template ? prompt_template : std::string(agswap::PromptTemplate::kDefault));
        return agswap::fuse_concepts(*require(oracle, "oracle").impl, require_str(c1, "c1"), require_str(c2, "c2"),
                                     prompt, to_params(params))
            .result;
    });
}

agswap_status agswap_result_summary(const agswap_result* result, agswap_summary* out) {
    return guarded([&] {
        const auto& r = require(result, "result").value;
        auto& s = require(out, "out");
        s.converged = r.converged ? 1 : 0;
        s.iterations = r.iterations();
        s.best_t = r.best_t;
        s.best_abs_s = r.best_abs_s;
        s.s = r.best_score.s;
        s.d1 = r.best_score.d1;
        s.d2 = r.best_score.d2;
        s.avg_sim = r.metrics.avg_sim;
        s.balance = r.metrics.balance;
        s.width = r.best_f.width();
    });
}

agswap_status agswap_result_best_vector(const agswap_result* result, uint8_t* bits, size_t width) {
    return guarded([&] { copy_vector(require(result, "result").value.best_f, bits, width); });
}

agswap_status agswap_result_final_vector(const agswap_result* result, uint8_t* bits, size_t width) {
    return guarded([&] { copy_vector(require(result, "result").value.final_f, bits, width); });
}

agswap_status agswap_result_write_trace(const agswap_result* result, const char* path) {
    return guarded([&] {
        const auto& r = require(result, "result").value;
        auto out = open_output(path);
        agswap::write_trace(out, r);
        if (!out) throw Error(ErrorCode::Io, std::string("failed writing ") + path);
    });
}

agswap_status agswap_result_write_json(const agswap_result* result, const char* path) {
    return guarded([&] {
        const auto& r = require(result, "result").value;
        auto out = open_output(path);
        out << agswap::summary_to_json(r).dump(2) << '\n';
        if (!out) throw Error(ErrorCode::Io, std::string("failed writing ") + path);
    });
}

void agswap_result_destroy(agswap_result* result) { delete result; }

agswap_status agswap_brute_force(agswap_oracle* oracle, const agswap_bundle* e1, const agswap_bundle* e2,
                                 uint8_t* bits_out, size_t width, double* min_abs_s) {
    return guarded([&] {
        const auto best = agswap::brute_force_search(require(e1, "e1").value, require(e2, "e2").value,
                                                     *require(oracle, "oracle").impl);
        copy_vector(best.f_opt, bits_out, width);
        if (min_abs_s) *min_abs_s = best.min_abs_s;
    });
}

agswap_status agswap_batch_run(agswap_oracle* oracle, const char* pairs_csv, const char* prompt_template,
                               const agswap_params* params, const char* out_csv, agswap_batch_summary* summary) {
    return guarded([&] {
        auto& o = require(oracle, "oracle");
        std::ifstream in(require_str(pairs_csv, "pairs_csv"));
        if (!in) throw Error(ErrorCode::Io, std::string("cannot open ") + pairs_csv);
        const auto pairs = agswap::cof::read_pairs_csv(in);
        if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no pairs");

        const agswap::PromptTemplate prompt(prompt_template ? prompt_template : std::string(agswap::PromptTemplate::kDefault));
        const auto rows = agswap::run_batch(*o.impl, pairs, prompt, to_params(params));
        auto out = open_output(out_csv);
        agswap::write_batch_csv(out, rows);

        if (summary) {
            const auto s = agswap::summarize(rows);
            summary->pairs = s.pairs;
            summary->succeeded = s.succeeded;
            summary->converged = s.converged;
            summary->mean_iters = s.mean_iters;
            summary->mean_avg_sim = s.mean_avg_sim;
            summary->mean_balance = s.mean_balance;
        }
    });
}

agswap_status agswap_cof_build(const agswap_cof_build_options* options, const char* manifest_out,
                               const char* warnings_out, agswap_cof_report* report) {
    return guarded([&] {
        const auto& o = require(options, "options");
        agswap::cof::BuildOptions build;
        build.edges = require_str(o.edges_tsv, "edges_tsv");
        build.leaves = require_str(o.leaves_txt, "leaves_txt");
        if (o.keep_txt) build.keep = o.keep_txt;
        if (o.delete_txt) build.remove = o.delete_txt;
        if (o.root) build.root = o.root;
        build.seed = o.seed;
        if (o.per_class) build.per_class = o.per_class;

        agswap::cof::BuildReport built;
        const auto manifest = agswap::cof::build_manifest(build, &built);
        agswap::cof::save_manifest(manifest, require_str(manifest_out, "manifest_out"));

        if (warnings_out) {
            auto out = open_output(warnings_out);
            for (const auto& w : built.warnings) out << w << '\n';
        }
        if (report) {
            report->candidate_count = built.candidate_count;
            report->curated_count = built.curated_count;
            report->superclass_count = manifest.superclasses.size();
            report->category_count = manifest.category_count();
            report->warning_count = built.warnings.size();
        }
    });
}

agswap_status agswap_cof_tiny(const char* manifest_path, uint64_t seed, const char* out_csv, size_t* count) {
    return guarded([&] {
        const auto manifest = agswap::cof::load_manifest(require_str(manifest_path, "manifest_path"));
        const auto picks = agswap::cof::tiny_subset(manifest, seed);
        auto out = open_output(out_csv);
        out << "superclass,subclass\n";
        for (const auto& p : picks) out << p.superclass << ',' << p.subclass << '\n';
        if (count) *count = picks.size();
    });
}

agswap_status agswap_cof_pairs(const char* manifest_path, agswap_pair_mode mode, uint64_t seed, const char* out_csv,
                               size_t* count) {
    return guarded([&] {
        const auto manifest = agswap::cof::load_manifest(require_str(manifest_path, "manifest_path"));
        const auto pairs = agswap::cof::enumerate_pairs(
            manifest, mode == AGSWAP_PAIRS_TINY ? agswap::cof::PairMode::Tiny : agswap::cof::PairMode::All, seed);
        auto out = open_output(out_csv);
        agswap::cof::write_pairs_csv(out, pairs);
        if (count) *count = pairs.size();
    });
}

}  // extern "C"
