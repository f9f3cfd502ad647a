#include "fsc/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cluster_detail.hpp"
#include "fsc/rng.hpp"

namespace fsc {

namespace detail {

void kmeanspp_fill(const EmbeddingMatrix& X, std::span<const std::size_t> candidates,
                   Centroids& out, std::size_t count, std::mt19937_64& rng) {
    if (count == 0) return;
    if (candidates.size() < count)
        throw parameter_error("k-means++ fill: " + std::to_string(count) +
                              " centers requested from " + std::to_string(candidates.size()) +
                              " candidates");
    out.d = X.d;
    out.data.reserve((out.k + count) * X.d);

    std::vector<double> min_d(candidates.size(), std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < out.k; ++j)
        for (std::size_t i = 0; i < candidates.size(); ++i)
            min_d[i] = std::min(min_d[i], sq_dist(X.row(candidates[i]), out.row(j)));

    std::vector<char> used(candidates.size(), 0);
    std::vector<double> weights(candidates.size(), 0.0);
    for (std::size_t added = 0; added < count; ++added) {
        std::size_t pick;
        if (out.k == 0) {
            pick = uniform_index(rng, candidates.size());
        } else {
            for (std::size_t i = 0; i < candidates.size(); ++i)
                weights[i] = used[i] ? 0.0 : min_d[i];
            pick = weighted_index(rng, weights);
            if (pick == static_cast<std::size_t>(-1)) {
                // Every unused candidate coincides with a chosen center;
                // fall back to a uniform draw so rows stay distinct.
                std::vector<std::size_t> unused;
                for (std::size_t i = 0; i < candidates.size(); ++i)
                    if (!used[i]) unused.push_back(i);
                pick = unused[uniform_index(rng, unused.size())];
            }
        }
        used[pick] = 1;
        const auto x = X.row(candidates[pick]);
        for (std::size_t t = 0; t < X.d; ++t) out.data.push_back(static_cast<double>(x[t]));
        ++out.k;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            min_d[i] = std::min(min_d[i], sq_dist(X.row(candidates[i]), out.row(out.k - 1)));
    }
}

Clustering labels_to_clustering(const std::vector<int>& labels, std::span<const std::string> ids,
                                std::size_t k) {
    Clustering c;
    c.k = k;
    for (std::size_t i = 0; i < labels.size(); ++i) c.assignment.emplace(ids[i], labels[i]);
    return c;
}

}  // namespace detail

Centroids kmeanspp_init(const EmbeddingMatrix& X, std::size_t k, std::uint64_t seed) {
    X.validate();
    if (k < 1 || k > X.n)
        throw parameter_error("k-means++: k must be in [1, n]; got k=" + std::to_string(k) +
                              ", n=" + std::to_string(X.n));
    std::mt19937_64 rng(seed);
    Centroids c;
    std::vector<std::size_t> all(X.n);
    for (std::size_t i = 0; i < X.n; ++i) all[i] = i;
    detail::kmeanspp_fill(X, all, c, k, rng);
    return c;
}

KMeansResult lloyd(const EmbeddingMatrix& X, const Centroids& init,
                   std::span<const std::string> ids, int max_iter, double tol) {
    X.validate();
    if (init.d != X.d)
        throw parameter_error("lloyd: centroid dimension " + std::to_string(init.d) +
                              " does not match data dimension " + std::to_string(X.d));
    if (init.k < 1) throw parameter_error("lloyd: need at least one centroid");
    if (max_iter < 1) throw parameter_error("lloyd: max_iter must be at least 1");
    if (ids.size() != X.n) throw parameter_error("lloyd: ids.size() must equal X.n");

    Centroids centroids = init;
    std::vector<int> labels(X.n, -1);
    std::vector<int> prev_labels;
    KMeansResult result;
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < X.n; ++i) labels[i] = detail::nearest(X.row(i), centroids);
        const Centroids before_update = centroids;
        detail::update_means(X, labels, centroids);
        const double inertia = detail::sse(X, labels, centroids);
        result.inertia_history.push_back(inertia);
        result.iterations = iter + 1;

        const bool fixed_point = (labels == prev_labels) || (centroids == before_update);
        if (fixed_point || detail::converged_by_tol(prev_inertia, inertia, tol)) break;
        prev_labels = labels;
        prev_inertia = inertia;
    }

    result.inertia = result.inertia_history.back();
    result.centroids = std::move(centroids);
    result.clustering = detail::labels_to_clustering(labels, ids, result.centroids.k);
    return result;
}

std::vector<double> margins(const EmbeddingMatrix& X, const Centroids& c) {
    if (c.k < 2) throw parameter_error("margins: need at least 2 centroids");
    if (c.d != X.d) throw parameter_error("margins: dimension mismatch");
    std::vector<double> out(X.n);
    for (std::size_t i = 0; i < X.n; ++i) {
        const auto x = X.row(i);
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c.k; ++j) {
            const double d = detail::sq_dist(x, c.row(j));
            if (d < best) {
                second = best;
                best = d;
            } else if (d < second) {
                second = d;
            }
        }
        out[i] = std::sqrt(second) - std::sqrt(best);
    }
    return out;
}

std::vector<int> nearest_clusters(std::span<const float> x, const Centroids& c, std::size_t m) {
    if (m > c.k)
        throw parameter_error("nearest_clusters: m=" + std::to_string(m) + " exceeds k=" +
                              std::to_string(c.k));
    if (x.size() != c.d) throw parameter_error("nearest_clusters: dimension mismatch");
    std::vector<std::pair<double, int>> dist(c.k);
    for (std::size_t j = 0; j < c.k; ++j)
        dist[j] = {detail::sq_dist(x, c.row(j)), static_cast<int>(j)};
    std::sort(dist.begin(), dist.end());  // ties fall to the lower index
    std::vector<int> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = dist[j].second;
    return out;
}

}  // namespace fsc
