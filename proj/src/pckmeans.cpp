#include "fsc/pckmeans.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

#include "cluster_detail.hpp"
#include "fsc/metrics.hpp"
#include "fsc/rng.hpp"

namespace fsc {

namespace {

struct IndexedConstraints {
    // Per row: (other row, relation). Symmetric; every constraint appears
    // under both endpoints.
    std::vector<std::vector<std::pair<std::size_t, Relation>>> adjacency;
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, Relation>> pairs;
    std::vector<char> constrained;  // row touched by any constraint

    IndexedConstraints(const ConstraintSet& cs, std::span<const std::string> ids) {
        std::unordered_map<std::string, std::size_t> index;
        index.reserve(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
        adjacency.resize(ids.size());
        constrained.assign(ids.size(), 0);
        auto resolve = [&](const std::string& id) {
            auto it = index.find(id);
            if (it == index.end())
                throw validation_error("constraint references unknown id '" + id + "'");
            return it->second;
        };
        for (const Constraint& c : cs.all()) {
            const std::size_t a = resolve(c.a);
            const std::size_t b = resolve(c.b);
            adjacency[a].emplace_back(b, c.relation);
            adjacency[b].emplace_back(a, c.relation);
            pairs.push_back({{a, b}, c.relation});
            constrained[a] = constrained[b] = 1;
        }
    }

    std::size_t count_violations(const std::vector<int>& labels) const {
        std::size_t v = 0;
        for (const auto& [pair, rel] : pairs) {
            const bool same = labels[pair.first] == labels[pair.second];
            if (rel == Relation::must_link ? !same : same) ++v;
        }
        return v;
    }
};

// Greedy pass over rows in `order`; rows assigned earlier in the pass exert
// constraint penalties on later ones.
std::vector<int> constrained_pass(const EmbeddingMatrix& X, const Centroids& c,
                                  const IndexedConstraints& idx, double w,
                                  std::span<const std::size_t> order) {
    std::vector<int> labels(X.n, -1);
    std::vector<long> extra(c.k);
    for (const std::size_t i : order) {
        long base = 0;
        std::fill(extra.begin(), extra.end(), 0L);
        for (const auto& [other, rel] : idx.adjacency[i]) {
            const int lo = labels[other];
            if (lo < 0) continue;  // not yet assigned in this pass
            if (rel == Relation::must_link) {
                ++base;        // violated everywhere ...
                --extra[lo];   // ... except in the partner's cluster
            } else {
                ++extra[lo];
            }
        }
        const auto x = X.row(i);
        int best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c.k; ++j) {
            const double cost =
                detail::sq_dist(x, c.row(j)) + w * static_cast<double>(base + extra[j]);
            if (cost < best_cost) {
                best_cost = cost;
                best = static_cast<int>(j);
            }
        }
        labels[i] = best;
    }
    return labels;
}

std::vector<std::size_t> ascending_id_order(std::span<const std::string> ids) {
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    return order;
}

void require_consistent(const ConstraintSet& cs, std::span<const std::string> ids) {
    std::vector<std::string> id_vec(ids.begin(), ids.end());
    auto conflicts = check_consistency(cs, id_vec);
    if (conflicts.empty()) return;
    std::string msg = "inconsistent constraints; conflicting cannot-links:";
    for (const Constraint& c : conflicts) msg += " (" + c.a + ", " + c.b + ")";
    throw validation_error(msg);
}

}  // namespace

Centroids init_from_neighborhoods(const EmbeddingMatrix& X, const ConstraintSet& cs,
                                  std::span<const std::string> ids, std::size_t k,
                                  std::uint64_t seed) {
    X.validate();
    if (ids.size() != X.n) throw parameter_error("init_from_neighborhoods: ids must match rows");
    if (k < 1 || k > X.n) throw parameter_error("init_from_neighborhoods: k must be in [1, n]");
    require_consistent(cs, ids);

    const IndexedConstraints idx(cs, ids);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

    // Neighborhoods are the closure components touching any constraint;
    // untouched points stay available for the D^2 top-up.
    std::vector<std::string> id_vec(ids.begin(), ids.end());
    std::vector<std::vector<std::size_t>> neighborhoods;
    for (const auto& component : mustlink_closure(cs, id_vec)) {
        std::vector<std::size_t> rows;
        rows.reserve(component.size());
        for (const std::string& id : component) rows.push_back(index.at(id));
        if (std::any_of(rows.begin(), rows.end(), [&](std::size_t r) { return idx.constrained[r]; }))
            neighborhoods.push_back(std::move(rows));
    }
    // Largest first; ties to the neighborhood holding the smallest member
    // id, which is the closure ordering already.
    std::stable_sort(neighborhoods.begin(), neighborhoods.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });

    std::mt19937_64 rng(seed);
    Centroids c;
    c.d = X.d;
    const std::size_t from_neighborhoods = std::min(k, neighborhoods.size());
    c.data.reserve(k * X.d);
    for (std::size_t j = 0; j < from_neighborhoods; ++j) {
        const auto& members = neighborhoods[j];
        for (std::size_t t = 0; t < X.d; ++t) {
            long double acc = 0.0L;
            for (std::size_t r : members) acc += static_cast<long double>(X.row(r)[t]);
            c.data.push_back(static_cast<double>(acc / static_cast<long double>(members.size())));
        }
        ++c.k;
    }
    if (c.k < k) {
        std::vector<std::size_t> unconstrained;
        for (std::size_t i = 0; i < X.n; ++i)
            if (!idx.constrained[i]) unconstrained.push_back(i);
        if (unconstrained.size() < k - c.k) {
            // Not enough free points; widen the candidate pool to all rows.
            unconstrained.resize(X.n);
            for (std::size_t i = 0; i < X.n; ++i) unconstrained[i] = i;
        }
        detail::kmeanspp_fill(X, unconstrained, c, k - c.k, rng);
    }
    return c;
}

Clustering assign_constrained(const EmbeddingMatrix& X, const Centroids& c,
                              const ConstraintSet& cs, double w,
                              std::span<const std::string> order) {
    X.validate();
    if (c.d != X.d) throw parameter_error("assign_constrained: dimension mismatch");
    if (order.size() != X.n)
        throw parameter_error("assign_constrained: order must be a permutation of all ids");
    if (w < 0.0) throw parameter_error("assign_constrained: w must be non-negative");

    // `order` both names the rows and fixes the pass order: position p of the
    // pass handles the row whose id is order[p].
    std::vector<std::string> ids(order.begin(), order.end());
    std::sort(ids.begin(), ids.end());
    const IndexedConstraints idx(cs, ids);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!index.emplace(ids[i], i).second)
            throw parameter_error("assign_constrained: duplicate id in order");

    std::vector<std::size_t> pass(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) pass[p] = index.at(order[p]);
    const std::vector<int> labels = constrained_pass(X, c, idx, w, pass);
    return detail::labels_to_clustering(labels, ids, c.k);
}

PCKMeansResult pckmeans(const EmbeddingMatrix& X, const ConstraintSet& cs,
                        std::span<const std::string> ids, const PCKMeansParams& params) {
    X.validate();
    if (ids.size() != X.n) throw parameter_error("pckmeans: ids must match rows");
    if (params.w < 0.0) throw parameter_error("pckmeans: w must be non-negative");
    if (params.max_iter < 1) throw parameter_error("pckmeans: max_iter must be at least 1");

    Centroids centroids = init_from_neighborhoods(X, cs, ids, params.k, params.seed);
    const IndexedConstraints idx(cs, ids);
    const std::vector<std::size_t> order = ascending_id_order(ids);

    std::vector<int> labels(X.n, -1);
    std::vector<int> prev_labels;
    PCKMeansResult result;
    double prev_objective = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < params.max_iter; ++iter) {
        labels = constrained_pass(X, centroids, idx, params.w, order);
        const Centroids before_update = centroids;
        detail::update_means(X, labels, centroids);
        const double inertia = detail::sse(X, labels, centroids);
        const std::size_t violations = idx.count_violations(labels);
        const double objective = inertia + params.w * static_cast<double>(violations);
        result.objective_history.push_back(objective);
        result.iterations = iter + 1;
        result.inertia = inertia;
        result.violations = violations;

        const bool fixed_point = (labels == prev_labels) || (centroids == before_update);
        if (fixed_point || detail::converged_by_tol(prev_objective, objective, params.tol)) break;
        prev_labels = labels;
        prev_objective = objective;
    }

    result.objective = result.objective_history.back();
    result.centroids = std::move(centroids);
    result.clustering = detail::labels_to_clustering(labels, ids, result.centroids.k);
    return result;
}

double tune_w(const EmbeddingMatrix& X_val, const ConstraintSet& cs_val,
              const GoldLabeling& gold_val, std::span<const std::string> ids,
              std::span<const double> grid, const PCKMeansParams& params, TaskMode mode) {
    if (grid.empty()) throw parameter_error("tune_w: empty grid");
    std::vector<double> values(grid.begin(), grid.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    double best_w = values.front();
    double best_metric = -1.0;
    for (const double w : values) {
        PCKMeansParams p = params;
        p.w = w;
        const PCKMeansResult run = pckmeans(X_val, cs_val, ids, p);
        double metric;
        if (mode == TaskMode::canonicalization) {
            const PRF macro = macro_prf(run.clustering, gold_val);
            const PRF micro = micro_prf(run.clustering, gold_val);
            const PRF pair = pair_prf(run.clustering, gold_val);
            metric = (macro.f1 + micro.f1 + pair.f1) / 3.0;
        } else {
            metric = hungarian_accuracy(run.clustering, gold_val);
        }
        if (metric > best_metric) {
            best_metric = metric;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace fsc
