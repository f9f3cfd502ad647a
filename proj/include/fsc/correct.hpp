#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsc/kmeans.hpp"
#include "fsc/oracle.hpp"
#include "fsc/types.hpp"

namespace fsc {

struct CorrectionCandidate {
    std::string id;
    int current = 0;
    double margin = 0.0;
    std::vector<int> alternatives;  // nearest first, excludes current, <= n_alt entries
};

// Low-confidence points in ascending margin order (ties by id).
struct CorrectionPlan {
    std::vector<CorrectionCandidate> candidates;
};

// Per cluster, the min(r, size) member ids nearest the cluster's member
// mean, ascending distance, ties by id. Empty clusters give empty lists.
std::vector<std::vector<std::string>> representatives(const EmbeddingMatrix& X,
                                                      const DocumentSet& docs,
                                                      const Clustering& clustering,
                                                      std::size_t r = 3);

// The k_low lowest-margin points with their n_alt nearest alternative
// clusters. Margins and proximity are Euclidean distances to `centroids`.
CorrectionPlan plan(const EmbeddingMatrix& X, const DocumentSet& docs,
                    const Clustering& clustering, const Centroids& centroids,
                    std::size_t k_low = 500, std::size_t n_alt = 4);

struct ReassignmentRecord {
    std::string id;
    int from = 0;
    std::optional<int> to;             // nullopt: assignment kept
    int queries = 0;
    std::vector<std::string> answers;  // oracle answer per query, ask order
    bool transport_failed = false;
};

struct CorrectionResult {
    Clustering clustering;
    std::vector<ReassignmentRecord> log;  // plan order, one record per candidate
};

// Single correction pass: each candidate is asked against its current
// cluster's representatives; a "no" walks the alternatives nearest-first and
// reassigns on the first "yes". Abstains and exhausted alternatives keep the
// current assignment. A transport failure skips the candidate (logged),
// never the pass. The plan is frozen: centroids and representatives are not
// recomputed between reassignments.
CorrectionResult correct(const CorrectionPlan& plan, const Clustering& clustering,
                         PairOracle& oracle, const DocumentSet& docs,
                         const std::vector<std::vector<std::string>>& cluster_representatives);

}  // namespace fsc
