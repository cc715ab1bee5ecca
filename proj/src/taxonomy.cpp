// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#include "agswap/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <iomanip>
#include <memory>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "agswap/errors.hpp"
#include "agswap/random.hpp"

namespace agswap::cof {

namespace {

const std::set<std::string> kNone;

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

bool skip_line(const std::string& line) { return line.empty() || line.front() == '#'; }

}  // namespace

std::string normalize_name(std::string name) {
    name = trim(std::move(name));
    std::string out;
    bool pending_space = false;
    for (unsigned char c : name) {
        if (std::isspace(c) || c == '_') {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += '_';
        pending_space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

TaxonomyGraph::TaxonomyGraph(std::vector<std::pair<std::string, std::string>> edges, std::vector<std::string> leaves,
                             std::string root)
    : root_(std::move(root)) {
    nodes_.insert(root_);
    for (auto& [child, parent] : edges) {
        if (child.empty() || parent.empty()) throw Error(ErrorCode::InvalidGraph, "edge with an empty endpoint");
        if (child == parent) throw Error(ErrorCode::InvalidGraph, "self loop on '" + child + "'");
        nodes_.insert(child);
        nodes_.insert(parent);
        parents_[child].insert(parent);
        children_[parent].insert(child);
    }
    if (parents_.count(root_)) throw Error(ErrorCode::InvalidGraph, "root '" + root_ + "' has a hypernym");

    // Kahn's algorithm over child -> parent edges.
    std::map<std::string, std::size_t> pending;
    for (const auto& n : nodes_) pending[n] = parents(n).size();
    std::deque<std::string> ready;
    for (const auto& [n, count] : pending) {
        if (count == 0) ready.push_back(n);
    }
    std::size_t ordered = 0;
    while (!ready.empty()) {
        const auto n = ready.front();
        ready.pop_front();
        ++ordered;
        for (const auto& c : children(n)) {
            if (--pending[c] == 0) ready.push_back(c);
        }
    }
    if (ordered != nodes_.size()) throw Error(ErrorCode::InvalidGraph, "hypernym graph contains a cycle");

    rooted_.insert(root_);
    std::deque<std::string> frontier{root_};
    while (!frontier.empty()) {
        const auto n = frontier.front();
        frontier.pop_front();
        for (const auto& c : children(n)) {
            if (rooted_.insert(c).second) frontier.push_back(c);
        }
    }

    for (auto& leaf : leaves) {
        if (!nodes_.count(leaf)) throw Error(ErrorCode::InvalidGraph, "category '" + leaf + "' is not in the graph");
        if (leaf == root_) throw Error(ErrorCode::InvalidGraph, "the root cannot be a category");
        if (!rooted_.count(leaf)) {
            throw Error(ErrorCode::NoPathToRoot, "category '" + leaf + "' has no hypernym path to '" + root_ + "'");
        }
        leaves_.insert(std::move(leaf));
    }
}

TaxonomyGraph TaxonomyGraph::load(const std::filesystem::path& edges_tsv, const std::filesystem::path& leaves_txt,
                                  std::string root) {
    std::vector<std::pair<std::string, std::string>> edges;
    auto in = open_input(edges_tsv);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_line(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(ErrorCode::InvalidGraph,
                        edges_tsv.string() + ":" + std::to_string(line_no) + ": expected child<TAB>parent");
        }
        edges.emplace_back(normalize_name(line.substr(0, tab)), normalize_name(line.substr(tab + 1)));
    }
    return TaxonomyGraph(std::move(edges), read_name_list(leaves_txt), normalize_name(std::move(root)));
}

const std::set<std::string>& TaxonomyGraph::parents(const std::string& name) const {
    auto it = parents_.find(name);
    return it == parents_.end() ? kNone : it->second;
}

const std::set<std::string>& TaxonomyGraph::children(const std::string& name) const {
    auto it = children_.find(name);
    return it == children_.end() ? kNone : it->second;
}

std::set<std::string> TaxonomyGraph::descendants(const std::string& name) const {
    std::set<std::string> seen;
    std::deque<std::string> frontier{name};
    while (!frontier.empty()) {
        const auto n = frontier.front();
        frontier.pop_front();
        for (const auto& c : children(n)) {
            if (seen.insert(c).second) frontier.push_back(c);
        }
    }
    return seen;
}

std::vector<std::string> hypernym_path(const TaxonomyGraph& g, const std::string& c) {
    if (!g.is_leaf(c)) throw Error(ErrorCode::UnknownCategory, "'" + c + "' is not a category of the taxonomy");
    std::vector<std::string> path{c};
    while (path.back() != g.root()) {
        const auto& parents = g.parents(path.back());
        auto next = std::find_if(parents.begin(), parents.end(), [&](const auto& p) { return g.reaches_root(p); });
        if (next == parents.end()) {
            throw Error(ErrorCode::NoPathToRoot, "no hypernym path from '" + c + "' to '" + g.root() + "'");
        }
        path.push_back(*next);
    }
    return path;
}

std::set<std::string> superclass_candidates(const TaxonomyGraph& g) {
    // Nodes whose hyponym closure meets the category set are exactly the
    // strict ancestors of some category.
    std::set<std::string> above_category;
    std::deque<std::string> frontier(g.leaves().begin(), g.leaves().end());
    while (!frontier.empty()) {
        const auto n = frontier.front();
        frontier.pop_front();
        for (const auto& p : g.parents(n)) {
            if (above_category.insert(p).second) frontier.push_back(p);
        }
    }

    std::set<std::string> candidates;
    for (const auto& c : g.leaves()) {
        const auto path = hypernym_path(g, c);
        for (std::size_t j = 1; j + 1 < path.size(); ++j) {
            if (!g.is_leaf(path[j]) && above_category.count(path[j])) candidates.insert(path[j]);
        }
    }
    return candidates;
}

CurationResult apply_curation(const TaxonomyGraph& g, const std::set<std::string>& candidates,
                              const std::vector<std::string>& keep, const std::vector<std::string>& remove) {
    const std::set<std::string> keep_set(keep.begin(), keep.end());
    const std::set<std::string> remove_set(remove.begin(), remove.end());

    std::vector<std::string> overlap;
    std::set_intersection(keep_set.begin(), keep_set.end(), remove_set.begin(), remove_set.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) {
        throw Error(ErrorCode::ConflictingLists,
                    "'" + overlap.front() + "' is on both the keep and the delete list (" +
                        std::to_string(overlap.size()) + " conflict(s))");
    }

    CurationResult result;
    for (const auto& name : candidates) {
        if (remove_set.count(name)) continue;
        if (keep_set.empty() || keep_set.count(name)) result.selected.insert(name);
    }
    for (const auto& name : keep_set) {
        if (candidates.count(name)) continue;
        if (g.contains(name)) {
            result.selected.insert(name);
            result.warnings.push_back("kept superclass '" + name + "' is not a candidate; included from the graph");
        } else {
            result.warnings.push_back("kept superclass '" + name + "' is not in the graph; skipped");
        }
    }
    for (const auto& name : remove_set) {
        if (!candidates.count(name)) result.warnings.push_back("deleted superclass '" + name + "' is not a candidate");
    }
    return result;
}

const char* to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::Original: return "original";
        case Provenance::TrimmedPool: return "trimmed_pool";
        case Provenance::WordnetExpansion: return "wordnet_expansion";
    }
    return "unknown";
}

Provenance provenance_from_string(const std::string& text) {
    if (text == "original") return Provenance::Original;
    if (text == "trimmed_pool") return Provenance::TrimmedPool;
    if (text == "wordnet_expansion") return Provenance::WordnetExpansion;
    throw Error(ErrorCode::ProtocolError, "unknown provenance '" + text + "'");
}

SuperclassEntry balance_subclasses(const TaxonomyGraph& g, const std::string& superclass, std::uint64_t seed,
                                   std::size_t per_class) {
    if (!g.contains(superclass)) throw Error(ErrorCode::UnknownCategory, "superclass '" + superclass + "' is not in the graph");
    if (per_class == 0) throw Error(ErrorCode::InvalidArgument, "subclass count must be positive");

    const auto below = g.descendants(superclass);
    std::vector<std::string> members;
    std::copy_if(below.begin(), below.end(), std::back_inserter(members), [&](const auto& n) { return g.is_leaf(n); });

    SuperclassEntry entry{superclass, {}, {}};
    if (members.size() > per_class) {
        std::vector<std::size_t> index(members.size());
        std::iota(index.begin(), index.end(), std::size_t{0});
        SplitMix64 rng(derive_seed(seed, "trim:" + superclass));
        auto chosen = sample_without_replacement(std::move(index), per_class, rng);
        std::sort(chosen.begin(), chosen.end());
        for (auto i : chosen) entry.subclasses.push_back(members[i]);
        entry.provenance.assign(per_class, Provenance::TrimmedPool);
        return entry;
    }

    entry.subclasses = members;
    entry.provenance.assign(members.size(), Provenance::Original);
    if (members.size() == per_class) return entry;

    std::set<std::string> taken(members.begin(), members.end());
    std::set<std::string> visited{superclass};
    std::deque<std::string> frontier{superclass};
    while (!frontier.empty() && entry.subclasses.size() < per_class) {
        const auto n = frontier.front();
        frontier.pop_front();
        for (const auto& c : g.children(n)) {
            if (!visited.insert(c).second) continue;
            frontier.push_back(c);
            if (taken.insert(c).second) {
                entry.subclasses.push_back(c);
                entry.provenance.push_back(Provenance::WordnetExpansion);
                if (entry.subclasses.size() == per_class) break;
            }
        }
    }
    if (entry.subclasses.size() < per_class) {
        throw Error(ErrorCode::InsufficientHyponyms, "superclass '" + superclass + "' has only " +
                                                         std::to_string(entry.subclasses.size()) +
                                                         " hyponyms, needs " + std::to_string(per_class));
    }
    return entry;
}

TaxonomyManifest build_manifest(const BuildOptions& options, BuildReport* report) {
    const auto graph = TaxonomyGraph::load(options.edges, options.leaves, options.root);
    const auto candidates = superclass_candidates(graph);
    const auto keep = options.keep.empty() ? std::vector<std::string>{} : read_name_list(options.keep);
    const auto remove = options.remove.empty() ? std::vector<std::string>{} : read_name_list(options.remove);
    auto curated = apply_curation(graph, candidates, keep, remove);

    TaxonomyManifest manifest;
    manifest.seed = options.seed;
    manifest.edges_sha256 = sha256_file(options.edges);
    manifest.leaves_sha256 = sha256_file(options.leaves);
    for (const auto& name : curated.selected) {
        manifest.superclasses.push_back(balance_subclasses(graph, name, options.seed, options.per_class));
    }
    if (report) {
        report->candidate_count = candidates.size();
        report->curated_count = curated.selected.size();
        report->warnings = std::move(curated.warnings);
    }
    return manifest;
}

std::size_t TaxonomyManifest::category_count() const {
    std::size_t n = 0;
    for (const auto& s : superclasses) n += s.subclasses.size();
    return n;
}

nlohmann::json to_json(const TaxonomyManifest& m) {
    auto classes = nlohmann::json::array();
    for (const auto& s : m.superclasses) {
        auto prov = nlohmann::json::array();
        for (auto p : s.provenance) prov.push_back(to_string(p));
        classes.push_back({{"name", s.name}, {"subclasses", s.subclasses}, {"provenance", prov}});
    }
    return {
        {"seed", m.seed},
        {"path_rule", "lexicographically_smallest_rooted_parent"},
        {"superclasses", classes},
        {"inputs", {{"edges_sha256", m.edges_sha256}, {"leaves_sha256", m.leaves_sha256}}},
    };
}

TaxonomyManifest manifest_from_json(const nlohmann::json& j) {
    try {
        TaxonomyManifest m;
        m.seed = j.at("seed").get<std::uint64_t>();
        std::set<std::string> names;
        for (const auto& s : j.at("superclasses")) {
            SuperclassEntry entry;
            entry.name = s.at("name").get<std::string>();
            entry.subclasses = s.at("subclasses").get<std::vector<std::string>>();
            for (const auto& p : s.at("provenance")) entry.provenance.push_back(provenance_from_string(p.get<std::string>()));
            if (entry.provenance.size() != entry.subclasses.size()) {
                throw Error(ErrorCode::ProtocolError, "superclass '" + entry.name + "' has mismatched provenance");
            }
            const std::set<std::string> distinct(entry.subclasses.begin(), entry.subclasses.end());
            if (distinct.size() != entry.subclasses.size()) {
                throw Error(ErrorCode::ProtocolError, "superclass '" + entry.name + "' repeats a subclass");
            }
            if (!names.insert(entry.name).second) {
                throw Error(ErrorCode::ProtocolError, "superclass '" + entry.name + "' appears twice");
            }
            m.superclasses.push_back(std::move(entry));
        }
        const auto& inputs = j.at("inputs");
        m.edges_sha256 = inputs.at("edges_sha256").get<std::string>();
        m.leaves_sha256 = inputs.at("leaves_sha256").get<std::string>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ProtocolError, std::string("malformed manifest: ") + e.what());
    }
}

TaxonomyManifest load_manifest(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return manifest_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ProtocolError, path.string() + ": " + e.what());
    }
}

void save_manifest(const TaxonomyManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << to_json(m).dump(2) << '\n';
}

std::vector<TinyPick> tiny_subset(const TaxonomyManifest& m, std::uint64_t seed) {
    std::vector<TinyPick> picks;
    for (const auto& s : m.superclasses) {
        if (s.subclasses.empty()) continue;
        SplitMix64 rng(derive_seed(seed, "tiny:" + s.name));
        picks.push_back({s.name, s.subclasses[rng.below(s.subclasses.size())]});
    }
    return picks;
}

std::vector<CategoryPair> enumerate_pairs(const TaxonomyManifest& m, PairMode mode, std::uint64_t seed) {
    std::set<std::string> categories;
    if (mode == PairMode::All) {
        for (const auto& s : m.superclasses) categories.insert(s.subclasses.begin(), s.subclasses.end());
    } else {
        for (const auto& pick : tiny_subset(m, seed)) categories.insert(pick.subclass);
    }
    const std::vector<std::string> sorted(categories.begin(), categories.end());
    std::vector<CategoryPair> pairs;
    if (sorted.size() >= 2) pairs.reserve(sorted.size() * (sorted.size() - 1) / 2);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) pairs.emplace_back(sorted[i], sorted[j]);
    }
    return pairs;
}

namespace {

void write_field(std::ostream& out, const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) {
        out << value;
        return;
    }
    out << '"';
    for (char c : value) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

}  // namespace

void write_pairs_csv(std::ostream& out, const std::vector<CategoryPair>& pairs) {
    out << "left,right\n";
    for (const auto& [left, right] : pairs) {
        write_field(out, left);
        out << ',';
        write_field(out, right);
        out << '\n';
    }
}

std::vector<CategoryPair> read_pairs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != "left,right") throw Error(ErrorCode::InvalidArgument, "pair file must start with 'left,right'");

    std::vector<CategoryPair> pairs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw Error(ErrorCode::InvalidArgument, "pair file line " + std::to_string(line_no) + " needs two fields");
        }
        pairs.emplace_back(trim(fields[0]), trim(fields[1]));
    }
    return pairs;
}

std::vector<std::string> read_name_list(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::string> names;
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (skip_line(line)) continue;
        names.push_back(normalize_name(line));
    }
    return names;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "cannot initialise SHA-256");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &length);

    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

}  // namespace agswap::cof
