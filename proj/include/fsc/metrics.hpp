#pragma once

#include <string>
#include <vector>

#include "fsc/types.hpp"

namespace fsc {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Set when a zero denominator forced the 1.0-by-convention value
    // (pairwise metrics on all-singleton clusterings).
    bool degenerate = false;
};

// Shared substrate for every metric: counts[pred cluster][gold label].
// Pred indices are the clustering's own; gold labels are mapped to columns
// in ascending label order.
struct ContingencyTable {
    std::vector<std::vector<long long>> counts;  // [pred][gold]
    std::vector<std::string> gold_labels;        // column -> label, ascending
    long long total = 0;

    static ContingencyTable build(const Clustering& pred, const GoldLabeling& gold);
};

// Macro: precision = fraction of non-empty predicted clusters that are
// gold-pure; recall = fraction of gold clusters contained in a single
// predicted cluster.
PRF macro_prf(const Clustering& pred, const GoldLabeling& gold);

// Micro: precision = fraction of points sharing the majority gold label of
// their predicted cluster; recall swaps the roles. Majority ties go to the
// lexicographically smallest gold label (smallest index on the pred side).
PRF micro_prf(const Clustering& pred, const GoldLabeling& gold);

// Pairwise: precision over predicted co-clustered pairs, recall over gold
// co-clustered pairs. A zero denominator yields 1.0 by convention, flagged.
PRF pair_prf(const Clustering& pred, const GoldLabeling& gold);

// Mutual information normalized by the arithmetic mean of the two label
// entropies. Both-degenerate (single cluster on each side) yields 1.0.
double nmi(const Clustering& pred, const GoldLabeling& gold);

// Accuracy under the best one-to-one cluster alignment (rectangular
// matching; unmatched clusters contribute nothing).
double hungarian_accuracy(const Clustering& pred, const GoldLabeling& gold);

// Maximum-weight one-to-one matching on a rectangular non-negative weight
// matrix. Returns per-row matched column (-1 for unmatched) and the total.
struct MatchingResult {
    std::vector<int> row_to_col;
    long long total = 0;
};
MatchingResult max_weight_matching(const std::vector<std::vector<long long>>& weights);

// Lifts a clustering of surface forms onto the individual mentions: each
// mention takes its surface form's cluster.
Clustering compose_surface(const Clustering& pred_surface, const DocumentSet& docs);

// Ceiling of surface-form clustering: each surface form goes to the gold
// label held by the majority of its mentions (ties to the lexicographically
// smallest label). Returns a clustering over surface forms.
Clustering optimal_surface_clustering(const DocumentSet& docs);

}  // namespace fsc
