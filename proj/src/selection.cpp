#include "fsc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "fsc/rng.hpp"

namespace fsc {

namespace {

double sq_dist_rows(const EmbeddingMatrix& X, std::size_t i, std::size_t j) {
    const auto a = X.row(i);
    const auto b = X.row(j);
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double diff = static_cast<double>(a[t]) - static_cast<double>(b[t]);
        s += diff * diff;
    }
    return s;
}

double sq_dist_to_mean(const EmbeddingMatrix& X, std::size_t i,
                       const std::vector<double>& mean) {
    const auto a = X.row(i);
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double diff = static_cast<double>(a[t]) - mean[t];
        s += diff * diff;
    }
    return s;
}

void check_paired(const EmbeddingMatrix& X, const DocumentSet& docs) {
    if (X.n != docs.size())
        throw validation_error("embedding row count " + std::to_string(X.n) +
                               " does not match document count " + std::to_string(docs.size()));
}

// Neighborhoods ordered by ascending distance from row `x` to each
// neighborhood's representative (its founding member); ties by neighborhood
// discovery index.
std::vector<std::size_t> representative_order(const EmbeddingMatrix& X, const DocumentSet& docs,
                                              const std::vector<Neighborhood>& neighborhoods,
                                              std::size_t x) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(neighborhoods.size());
    for (std::size_t ni = 0; ni < neighborhoods.size(); ++ni) {
        const std::size_t rep = docs.index_of(neighborhoods[ni].front());
        ranked.emplace_back(sq_dist_rows(X, x, rep), ni);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::size_t> order;
    order.reserve(ranked.size());
    for (const auto& [dist, ni] : ranked) order.push_back(ni);
    return order;
}

// Neighborhoods ordered by ascending distance from row `x` to each
// neighborhood's centroid (member mean); ties by neighborhood index.
std::vector<std::size_t> centroid_order(const EmbeddingMatrix& X, const DocumentSet& docs,
                                        const std::vector<Neighborhood>& neighborhoods,
                                        std::size_t x) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(neighborhoods.size());
    for (std::size_t ni = 0; ni < neighborhoods.size(); ++ni) {
        std::vector<double> mean(X.d, 0.0);
        for (const std::string& id : neighborhoods[ni]) {
            const auto row = X.row(docs.index_of(id));
            for (std::size_t t = 0; t < X.d; ++t) mean[t] += static_cast<double>(row[t]);
        }
        for (double& m : mean) m /= static_cast<double>(neighborhoods[ni].size());
        ranked.emplace_back(sq_dist_to_mean(X, x, mean), ni);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::size_t> order;
    order.reserve(ranked.size());
    for (const auto& [dist, ni] : ranked) order.push_back(ni);
    return order;
}

}  // namespace

SelectionResult explore(const EmbeddingMatrix& X, const DocumentSet& docs, PairOracle& oracle,
                        std::size_t budget, std::uint64_t seed) {
    check_paired(X, docs);
    if (budget < 1) throw parameter_error("explore: budget must be >= 1");

    SelectionResult result;
    std::mt19937_64 rng(seed);
    const std::size_t n = X.n;
    std::vector<char> visited(n, 0);

    const std::size_t start = uniform_index(rng, n);
    visited[start] = 1;
    result.neighborhoods.push_back({docs[start].id});

    // min squared distance from each point to any neighborhood member
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    auto absorb_member = [&](std::size_t member) {
        for (std::size_t i = 0; i < n; ++i) {
            if (visited[i]) continue;
            min_dist[i] = std::min(min_dist[i], sq_dist_rows(X, i, member));
        }
    };
    absorb_member(start);

    std::size_t used = 0;
    while (used < budget) {
        // farthest-first: maximize min distance, ties to the lowest index
        std::size_t x = n;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (visited[i]) continue;
            if (min_dist[i] > best) {
                best = min_dist[i];
                x = i;
            }
        }
        if (x == n) break;  // everything interrogated
        visited[x] = 1;

        bool joined = false;
        bool cut_off = false;
        for (std::size_t ni : representative_order(X, docs, result.neighborhoods, x)) {
            if (used == budget) {
                cut_off = true;  // budget died mid-point: drop it
                break;
            }
            const std::string& rep = result.neighborhoods[ni].front();
            PairJudgment j = oracle.judge(PairQuery(docs[x].id, rep, QueryPhase::explore));
            ++used;
            result.judgments.push_back(std::move(j));
            if (result.judgments.back().answer == Answer::must_link) {
                result.neighborhoods[ni].push_back(docs[x].id);
                joined = true;
                break;
            }
        }
        if (!joined && !cut_off) result.neighborhoods.push_back({docs[x].id});
        if (joined || !cut_off) absorb_member(x);
    }
    return result;
}

SelectionResult consolidate(const EmbeddingMatrix& X, const DocumentSet& docs, PairOracle& oracle,
                            std::vector<Neighborhood> neighborhoods, std::size_t budget,
                            std::uint64_t seed) {
    check_paired(X, docs);
    if (neighborhoods.empty()) throw parameter_error("consolidate: no neighborhoods discovered");

    SelectionResult result;
    result.neighborhoods = std::move(neighborhoods);
    std::mt19937_64 rng(seed);

    std::vector<char> assigned(X.n, 0);
    for (const Neighborhood& nb : result.neighborhoods)
        for (const std::string& id : nb) assigned[docs.index_of(id)] = 1;
    std::vector<std::size_t> pool;  // untried unassigned points, ascending
    for (std::size_t i = 0; i < X.n; ++i)
        if (!assigned[i]) pool.push_back(i);

    std::size_t used = 0;
    while (used < budget && !pool.empty()) {
        const std::size_t pick = uniform_index(rng, pool.size());
        const std::size_t x = pool[pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));

        for (std::size_t ni : centroid_order(X, docs, result.neighborhoods, x)) {
            if (used == budget) break;
            const std::string& rep = result.neighborhoods[ni].front();
            PairJudgment j = oracle.judge(PairQuery(docs[x].id, rep, QueryPhase::consolidate));
            ++used;
            result.judgments.push_back(std::move(j));
            if (result.judgments.back().answer == Answer::must_link) {
                result.neighborhoods[ni].push_back(docs[x].id);
                break;
            }
        }
    }
    return result;
}

std::vector<PairQuery> closest_distinct_pairs(const EmbeddingMatrix& X, const DocumentSet& docs,
                                              std::size_t budget) {
    check_paired(X, docs);
    if (!docs.canonicalization_mode())
        throw parameter_error("closest_distinct_pairs requires surface forms on every item");
    {
        std::vector<std::string> surfaces;
        for (const Document& doc : docs.items()) surfaces.push_back(*doc.surface);
        std::sort(surfaces.begin(), surfaces.end());
        surfaces.erase(std::unique(surfaces.begin(), surfaces.end()), surfaces.end());
        if (surfaces.size() < 2)
            throw parameter_error("closest_distinct_pairs needs at least 2 distinct surface forms");
    }

    struct Ranked {
        double dist;
        std::string a;
        std::string b;
        bool operator<(const Ranked& o) const {  // max-heap: farthest on top
            return std::tie(dist, a, b) < std::tie(o.dist, o.a, o.b);
        }
    };
    std::priority_queue<Ranked> heap;
    for (std::size_t i = 0; i < X.n; ++i) {
        for (std::size_t j = i + 1; j < X.n; ++j) {
            if (*docs[i].surface == *docs[j].surface) continue;
            Ranked r{sq_dist_rows(X, i, j), docs[i].id, docs[j].id};
            if (r.b < r.a) std::swap(r.a, r.b);
            if (heap.size() < budget) {
                heap.push(std::move(r));
            } else if (!heap.empty() && r < heap.top()) {
                heap.pop();
                heap.push(std::move(r));
            }
        }
    }
    std::vector<Ranked> ranked;
    ranked.reserve(heap.size());
    while (!heap.empty()) {
        ranked.push_back(heap.top());
        heap.pop();
    }
    std::reverse(ranked.begin(), ranked.end());  // ascending distance
    std::vector<PairQuery> out;
    out.reserve(ranked.size());
    for (Ranked& r : ranked)
        out.emplace_back(std::move(r.a), std::move(r.b), QueryPhase::closest_pair);
    return out;
}

ConstraintSet judgments_to_constraints(const std::vector<PairJudgment>& judgments,
                                       ConstraintSource source) {
    ConstraintSet cs;
    for (const PairJudgment& j : judgments) {
        if (j.answer == Answer::abstain) continue;
        cs.add(Constraint(j.query.a, j.query.b,
                          j.answer == Answer::must_link ? Relation::must_link
                                                        : Relation::cannot_link,
                          source));
    }
    return cs;
}

}  // namespace fsc
