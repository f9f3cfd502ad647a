#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsc/types.hpp"

namespace fsc {

struct Centroids {
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<double> data;  // k * d, row-major

    Centroids() = default;
    Centroids(std::size_t k_, std::size_t d_) : k(k_), d(d_), data(k_ * d_, 0.0) {}

    std::span<const double> row(std::size_t j) const { return {data.data() + j * d, d}; }
    std::span<double> row(std::size_t j) { return {data.data() + j * d, d}; }

    bool operator==(const Centroids&) const = default;
};

struct KMeansResult {
    Clustering clustering;
    Centroids centroids;
    double inertia = 0.0;
    int iterations = 0;
    // Inertia after each assignment+update pass; non-increasing.
    std::vector<double> inertia_history;
};

// K-Means++ D^2 seeding: first center uniform, each further center drawn with
// probability proportional to its squared distance to the nearest chosen
// center. Returns k distinct rows of X. Deterministic given the seed.
Centroids kmeanspp_init(const EmbeddingMatrix& X, std::size_t k, std::uint64_t seed);

// Lloyd iterations from the given centroids: nearest-centroid assignment
// (squared Euclidean, ties to the lower index) alternating with mean
// updates, until the assignment reaches a fixed point, the relative inertia
// improvement drops below tol, or max_iter passes. A cluster emptied by the
// assignment step is reseeded with the point farthest from its assigned
// centroid. `ids` names the rows; ids.size() must equal X.n.
KMeansResult lloyd(const EmbeddingMatrix& X, const Centroids& init,
                   std::span<const std::string> ids, int max_iter = 300, double tol = 1e-6);

// Per-point gap between the Euclidean distances to the second-nearest and
// nearest centroids. Requires k >= 2; exact ties give margin 0.
std::vector<double> margins(const EmbeddingMatrix& X, const Centroids& c);

// The m cluster indices nearest to x by Euclidean distance, ascending,
// distance ties broken by ascending index. Requires m <= k.
std::vector<int> nearest_clusters(std::span<const float> x, const Centroids& c, std::size_t m);

}  // namespace fsc
