#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsc/constraints.hpp"
#include "fsc/pair_query.hpp"
#include "fsc/types.hpp"

namespace fsc {

// Line-delimited JSON file formats shared by every pipeline stage.
//
// Dataset:     {"id": str, "text": str, "context": [str...], "surface": str?, "gold": str?}
// Constraints: {"a": str, "b": str, "relation": "must"|"cannot", "source": str}
// Clustering:  {"id": str, "cluster": int}
// Pairs:       {"a": str, "b": str, "phase": str}

DocumentSet load_dataset(const std::filesystem::path& file);
void save_dataset(const std::filesystem::path& file, const DocumentSet& docs);

struct ConstraintLoadOptions {
    // Resolve pairs carrying both relations by discarding the cannot-link
    // side instead of failing. Must-links seed the constrained
    // initialization, so they are preserved preferentially.
    bool drop_conflicts = false;
};

ConstraintSet load_constraints(const std::filesystem::path& file,
                               const ConstraintLoadOptions& opts = {});
void save_constraints(const std::filesystem::path& file, const std::vector<Constraint>& cs);

// File-order constraint list with no set semantics; lets callers cap a
// constraint file at a budget before building the deduplicated set.
std::vector<Constraint> load_constraint_list(const std::filesystem::path& file);

std::vector<PairQuery> load_pairs(const std::filesystem::path& file);
void save_pairs(const std::filesystem::path& file, const std::vector<PairQuery>& pairs);

Clustering load_clustering(const std::filesystem::path& file);
void save_clustering(const std::filesystem::path& file, const Clustering& c,
                     const std::vector<std::string>& id_order);

}  // namespace fsc
