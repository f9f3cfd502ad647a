#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsc/constraints.hpp"
#include "fsc/oracle.hpp"
#include "fsc/pair_query.hpp"
#include "fsc/types.hpp"

namespace fsc {

// A discovered neighborhood: member ids in join order. The first member is
// the founding point and serves as the neighborhood's query representative.
using Neighborhood = std::vector<std::string>;

struct SelectionResult {
    std::vector<PairJudgment> judgments;  // every oracle query, ask order
    std::vector<Neighborhood> neighborhoods;
};

// Farthest-first Explore phase: starting from a seeded random point,
// repeatedly take the point maximizing its min distance to all neighborhood
// members (ties -> lowest row index) and query it against one representative
// per existing neighborhood, nearest representative first, until a must-link
// joins it or every neighborhood answered otherwise (new neighborhood). Stops
// at `budget` queries; a point cut off mid-interrogation joins nothing.
SelectionResult explore(const EmbeddingMatrix& X, const DocumentSet& docs, PairOracle& oracle,
                        std::size_t budget, std::uint64_t seed);

// Consolidate phase: repeatedly pick a seeded-random not-yet-tried point
// outside all neighborhoods and query it against neighborhoods in ascending
// centroid-distance order until a must-link assigns it or the budget runs
// out. Returns the grown neighborhoods.
SelectionResult consolidate(const EmbeddingMatrix& X, const DocumentSet& docs, PairOracle& oracle,
                            std::vector<Neighborhood> neighborhoods, std::size_t budget,
                            std::uint64_t seed);

// Canonicalization-mode selection: all pairs of items with distinct surface
// forms ranked by ascending embedding distance (ties by lexicographic id
// pair), truncated to `budget`.
std::vector<PairQuery> closest_distinct_pairs(const EmbeddingMatrix& X, const DocumentSet& docs,
                                              std::size_t budget);

// Converts answered queries into constraints. Abstains never become
// constraints. Duplicate pairs collapse via ConstraintSet::add.
ConstraintSet judgments_to_constraints(const std::vector<PairJudgment>& judgments,
                                       ConstraintSource source);

}  // namespace fsc
