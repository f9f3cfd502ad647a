#pragma once

// Internal numerical kernels shared by the plain and the constrained
// clusterer. Both loops must produce bit-identical arithmetic when no
// constraints are present, so every distance, mean, and inertia computation
// funnels through these helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fsc/kmeans.hpp"
#include "fsc/types.hpp"

namespace fsc::detail {

inline double sq_dist(std::span<const float> x, std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double diff = static_cast<double>(x[t]) - c[t];
        acc += diff * diff;
    }
    return acc;
}

// Nearest centroid by squared Euclidean distance, ties to the lower index.
inline int nearest(std::span<const float> x, const Centroids& c) {
    int best = 0;
    double best_d = sq_dist(x, c.row(0));
    for (std::size_t j = 1; j < c.k; ++j) {
        const double d = sq_dist(x, c.row(j));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

// Sum of squared distances to assigned centroids, accumulated in extended
// precision. Point order is fixed (row order) so the result is reproducible.
inline double sse(const EmbeddingMatrix& X, const std::vector<int>& labels, const Centroids& c) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < X.n; ++i) acc += sq_dist(X.row(i), c.row(labels[i]));
    return static_cast<double>(acc);
}

// Mean update. Clusters left empty by the assignment keep their previous
// centroid, then get reseeded one at a time with the point farthest from its
// assigned centroid (ties to the lower row index); the reseeding point moves
// into the revived cluster so it cannot be claimed twice.
inline void update_means(const EmbeddingMatrix& X, std::vector<int>& labels, Centroids& c) {
    const std::size_t k = c.k;
    const std::size_t d = c.d;
    std::vector<long double> sums(k * d, 0.0L);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < X.n; ++i) {
        const auto x = X.row(i);
        long double* s = sums.data() + static_cast<std::size_t>(labels[i]) * d;
        for (std::size_t t = 0; t < d; ++t) s[t] += static_cast<long double>(x[t]);
        ++counts[labels[i]];
    }
    std::vector<std::size_t> empty;
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) {
            empty.push_back(j);
            continue;
        }
        auto row = c.row(j);
        const long double* s = sums.data() + j * d;
        for (std::size_t t = 0; t < d; ++t)
            row[t] = static_cast<double>(s[t] / static_cast<long double>(counts[j]));
    }
    for (std::size_t j : empty) {
        std::size_t farthest = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < X.n; ++i) {
            const double dist = sq_dist(X.row(i), c.row(labels[i]));
            if (dist > far_d) {
                far_d = dist;
                farthest = i;
            }
        }
        const auto x = X.row(farthest);
        auto row = c.row(j);
        for (std::size_t t = 0; t < d; ++t) row[t] = static_cast<double>(x[t]);
        labels[farthest] = static_cast<int>(j);
    }
}

// Appends `count` additional centers to `out` by D^2 sampling over
// `candidates` (row indices into X). Distances are measured against every
// center already in `out`. When all candidate weights vanish (duplicate
// points), falls back to uniform choice among unused candidates.
void kmeanspp_fill(const EmbeddingMatrix& X, std::span<const std::size_t> candidates,
                   Centroids& out, std::size_t count, std::mt19937_64& rng);

Clustering labels_to_clustering(const std::vector<int>& labels, std::span<const std::string> ids,
                                std::size_t k);

// Stop when the previous pass objective improved by less than tol, relative
// to the larger magnitude.
inline bool converged_by_tol(double prev, double cur, double tol) {
    const double scale = std::max(std::abs(prev), std::abs(cur));
    if (scale == 0.0) return true;
    return (prev - cur) < tol * scale;
}

}  // namespace fsc::detail
