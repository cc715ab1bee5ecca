// Copyright (C) 2026 AGSwap contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace agswap::cof {

inline constexpr std::size_t kSubclassesPerSuperclass = 10;

/// WordNet-style hypernym DAG restricted to what dataset construction needs.
/// Edges run child -> parent. Construction validates the graph: acyclic, every
/// leaf category present and connected to the root.
class TaxonomyGraph {
public:
    TaxonomyGraph(std::vector<std::pair<std::string, std::string>> edges, std::vector<std::string> leaves,
                  std::string root = "object");

    // edges: "child<TAB>parent" per line; leaves: one category per line.
    // Blank lines and lines starting with '#' are skipped.
    static TaxonomyGraph load(const std::filesystem::path& edges_tsv, const std::filesystem::path& leaves_txt,
                              std::string root = "object");

    [[nodiscard]] const std::string& root() const noexcept { return root_; }
    [[nodiscard]] const std::set<std::string>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::set<std::string>& leaves() const noexcept { return leaves_; }
    [[nodiscard]] bool contains(const std::string& name) const { return nodes_.count(name) != 0; }
    [[nodiscard]] bool is_leaf(const std::string& name) const { return leaves_.count(name) != 0; }

    [[nodiscard]] const std::set<std::string>& parents(const std::string& name) const;
    [[nodiscard]] const std::set<std::string>& children(const std::string& name) const;

    // All strict descendants (the hyponym closure).
    [[nodiscard]] std::set<std::string> descendants(const std::string& name) const;

    // Nodes from which the root is reachable (the root included).
    [[nodiscard]] bool reaches_root(const std::string& name) const { return rooted_.count(name) != 0; }

private:
    std::string root_;
    std::set<std::string> nodes_;
    std::set<std::string> leaves_;
    std::map<std::string, std::set<std::string>> parents_;
    std::map<std::string, std::set<std::string>> children_;
    std::set<std::string> rooted_;
};

/// Path from category `c` up to the root. Where a node has several hypernyms
/// the lexicographically smallest parent that still reaches the root is taken.
std::vector<std::string> hypernym_path(const TaxonomyGraph& g, const std::string& c);

/// Interior hypernym-path nodes (neither the leaf nor the root) of every leaf
/// category whose hyponym closure meets the category set. Category names
/// themselves are never candidates.
std::set<std::string> superclass_candidates(const TaxonomyGraph& g);

struct CurationResult {
    std::set<std::string> selected;
    std::vector<std::string> warnings;
};

/// (candidates \ delete) ∩ keep. A keep name missing from the candidates is
/// reported, and still selected when the graph has a node of that name.
/// Throws ConflictingLists when keep and delete overlap.
CurationResult apply_curation(const TaxonomyGraph& g, const std::set<std::string>& candidates,
                              const std::vector<std::string>& keep, const std::vector<std::string>& remove);

enum class Provenance { Original, TrimmedPool, WordnetExpansion };

const char* to_string(Provenance p) noexcept;
Provenance provenance_from_string(const std::string& text);

struct SuperclassEntry {
    std::string name;
    std::vector<std::string> subclasses;
    std::vector<Provenance> provenance;

    friend bool operator==(const SuperclassEntry&, const SuperclassEntry&) = default;
};

/// Picks the superclass's subclasses: its leaf categories, trimmed to a seeded
/// uniform sample when there are too many, topped up with other hyponyms in
/// breadth-first, lexicographic order when there are too few.
SuperclassEntry balance_subclasses(const TaxonomyGraph& g, const std::string& superclass, std::uint64_t seed,
                                   std::size_t per_class = kSubclassesPerSuperclass);

struct TaxonomyManifest {
    std::uint64_t seed = 0;
    std::vector<SuperclassEntry> superclasses;
    std::string edges_sha256;
    std::string leaves_sha256;

    [[nodiscard]] std::size_t category_count() const;

    friend bool operator==(const TaxonomyManifest&, const TaxonomyManifest&) = default;
};

nlohmann::json to_json(const TaxonomyManifest& m);
TaxonomyManifest manifest_from_json(const nlohmann::json& j);
TaxonomyManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const TaxonomyManifest& m, const std::filesystem::path& path);

struct BuildOptions {
    std::filesystem::path edges;
    std::filesystem::path leaves;
    // Optional curation lists; an empty path means no list.
    std::filesystem::path keep;
    std::filesystem::path remove;
    std::string root = "object";
    std::uint64_t seed = 0;
    std::size_t per_class = kSubclassesPerSuperclass;
};

struct BuildReport {
    std::size_t candidate_count = 0;
    std::size_t curated_count = 0;
    std::vector<std::string> warnings;
};

/// Candidates -> curation -> subclass balancing, with input fingerprints.
TaxonomyManifest build_manifest(const BuildOptions& options, BuildReport* report = nullptr);

using CategoryPair = std::pair<std::string, std::string>;

enum class PairMode { All, Tiny };

struct TinyPick {
    std::string superclass;
    std::string subclass;
};

/// One seeded subclass per superclass.
std::vector<TinyPick> tiny_subset(const TaxonomyManifest& m, std::uint64_t seed);

/// Unordered pairs, each normalized to left < right and listed in ascending
/// order. All: every distinct category of the manifest; Tiny: the tiny_subset.
std::vector<CategoryPair> enumerate_pairs(const TaxonomyManifest& m, PairMode mode, std::uint64_t seed);

void write_pairs_csv(std::ostream& out, const std::vector<CategoryPair>& pairs);
std::vector<CategoryPair> read_pairs_csv(std::istream& in);

// Reads a plain name list (one per line; '#' comments), normalizing each name
// to lowercase with spaces joined by underscores.
std::vector<std::string> read_name_list(const std::filesystem::path& path);
std::string normalize_name(std::string name);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace agswap::cof
