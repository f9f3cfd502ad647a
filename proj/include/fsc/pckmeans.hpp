#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsc/constraints.hpp"
#include "fsc/kmeans.hpp"
#include "fsc/types.hpp"

namespace fsc {

struct PCKMeansParams {
    std::size_t k = 1;
    double w = 1.0;  // per-violation penalty weight, >= 0
    std::uint64_t seed = 0;
    int max_iter = 300;
    double tol = 1e-6;
};

struct PCKMeansResult {
    Clustering clustering;
    Centroids centroids;
    double inertia = 0.0;
    double objective = 0.0;  // inertia + w * violations
    std::size_t violations = 0;  // against the final full assignment
    int iterations = 0;
    std::vector<double> objective_history;
};

// Constraint-seeded initialization: centroids of the k largest must-link
// closure neighborhoods (ties to the one with the smallest member id),
// topped up by D^2 sampling over unconstrained points when fewer than k
// neighborhoods exist. With no constraints this is exactly kmeanspp_init.
// Rejects inconsistent constraint sets.
Centroids init_from_neighborhoods(const EmbeddingMatrix& X, const ConstraintSet& cs,
                                  std::span<const std::string> ids, std::size_t k,
                                  std::uint64_t seed);

// One greedy assignment pass in the given order: each point takes the
// cluster minimizing squared distance to its centroid plus w per constraint
// violated against points assigned earlier in the pass. Ties go to the lower
// cluster index.
Clustering assign_constrained(const EmbeddingMatrix& X, const Centroids& c,
                              const ConstraintSet& cs, double w,
                              std::span<const std::string> order);

// Full constrained clustering: neighborhood init, then alternating greedy
// assignment (ascending id order) and mean updates until the assignment
// reaches a fixed point, the relative objective improvement drops below tol,
// or max_iter passes.
PCKMeansResult pckmeans(const EmbeddingMatrix& X, const ConstraintSet& cs,
                        std::span<const std::string> ids, const PCKMeansParams& params);

enum class TaskMode { text, canonicalization };

// Runs pckmeans on the validation split for every grid value and returns the
// w maximizing the task's headline metric: Hungarian accuracy for text,
// mean of macro/micro/pairwise F1 for canonicalization. Duplicate grid
// entries are collapsed; metric ties go to the smaller w.
double tune_w(const EmbeddingMatrix& X_val, const ConstraintSet& cs_val,
              const GoldLabeling& gold_val, std::span<const std::string> ids,
              std::span<const double> grid, const PCKMeansParams& params, TaskMode mode);

}  // namespace fsc
