#include "fsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace fsc {

namespace {

double f1_of(double p, double r) {
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

PRF make_prf(double p, double r, bool degenerate = false) {
    PRF out;
    out.precision = p;
    out.recall = r;
    out.f1 = f1_of(p, r);
    out.degenerate = degenerate;
    return out;
}

long long pairs_of(long long c) { return c * (c - 1) / 2; }

void check_alignment(const Clustering& pred, const GoldLabeling& gold) {
    if (pred.assignment.size() != gold.labels.size())
        throw validation_error("metrics: prediction and gold labeling cover different items");
    for (const auto& [id, cluster] : pred.assignment) {
        (void)cluster;
        gold.at(id);  // throws on unlabeled id
    }
}

}  // namespace

ContingencyTable ContingencyTable::build(const Clustering& pred, const GoldLabeling& gold) {
    check_alignment(pred, gold);
    ContingencyTable table;
    std::map<std::string, std::size_t> columns;
    for (const auto& [id, label] : gold.labels) columns.emplace(label, 0);
    std::size_t col = 0;
    for (auto& [label, idx] : columns) {
        idx = col++;
        table.gold_labels.push_back(label);
    }
    table.counts.assign(pred.k, std::vector<long long>(columns.size(), 0));
    for (const auto& [id, cluster] : pred.assignment) {
        if (cluster < 0 || static_cast<std::size_t>(cluster) >= pred.k)
            throw validation_error("metrics: cluster index out of range for id '" + id + "'");
        ++table.counts[cluster][columns.at(gold.at(id))];
        ++table.total;
    }
    return table;
}

PRF macro_prf(const Clustering& pred, const GoldLabeling& gold) {
    const ContingencyTable t = ContingencyTable::build(pred, gold);
    long long nonempty = 0;
    long long pure = 0;
    for (const auto& row : t.counts) {
        long long size = 0;
        long long largest = 0;
        for (long long c : row) {
            size += c;
            largest = std::max(largest, c);
        }
        if (size == 0) continue;
        ++nonempty;
        if (largest == size) ++pure;  // every member shares one gold label
    }
    long long gold_clusters = 0;
    long long contained = 0;
    for (std::size_t g = 0; g < t.gold_labels.size(); ++g) {
        long long size = 0;
        long long largest = 0;
        for (const auto& row : t.counts) {
            size += row[g];
            largest = std::max(largest, row[g]);
        }
        if (size == 0) continue;
        ++gold_clusters;
        if (largest == size) ++contained;
    }
    const double p = nonempty == 0 ? 0.0 : static_cast<double>(pure) / static_cast<double>(nonempty);
    const double r = gold_clusters == 0
                         ? 0.0
                         : static_cast<double>(contained) / static_cast<double>(gold_clusters);
    return make_prf(p, r);
}

PRF micro_prf(const Clustering& pred, const GoldLabeling& gold) {
    const ContingencyTable t = ContingencyTable::build(pred, gold);
    // Majority gold column per predicted cluster; ties resolve to the lower
    // column, which is the lexicographically smaller label by construction.
    long long hits_p = 0;
    for (const auto& row : t.counts) {
        long long best = 0;
        for (long long c : row) best = std::max(best, c);
        hits_p += best;
    }
    long long hits_r = 0;
    for (std::size_t g = 0; g < t.gold_labels.size(); ++g) {
        long long best = 0;
        for (const auto& row : t.counts) best = std::max(best, row[g]);
        hits_r += best;
    }
    const double n = static_cast<double>(t.total);
    return make_prf(static_cast<double>(hits_p) / n, static_cast<double>(hits_r) / n);
}

PRF pair_prf(const Clustering& pred, const GoldLabeling& gold) {
    const ContingencyTable t = ContingencyTable::build(pred, gold);
    long long pred_pairs = 0;
    long long gold_pairs = 0;
    long long both = 0;
    for (const auto& row : t.counts) {
        long long size = 0;
        for (long long c : row) {
            size += c;
            both += pairs_of(c);
        }
        pred_pairs += pairs_of(size);
    }
    for (std::size_t g = 0; g < t.gold_labels.size(); ++g) {
        long long size = 0;
        for (const auto& row : t.counts) size += row[g];
        gold_pairs += pairs_of(size);
    }
    const bool degenerate = pred_pairs == 0 || gold_pairs == 0;
    const double p =
        pred_pairs == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(pred_pairs);
    const double r =
        gold_pairs == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(gold_pairs);
    return make_prf(p, r, degenerate);
}

double nmi(const Clustering& pred, const GoldLabeling& gold) {
    const ContingencyTable t = ContingencyTable::build(pred, gold);
    const double n = static_cast<double>(t.total);
    std::vector<long long> row_sums(t.counts.size(), 0);
    std::vector<long long> col_sums(t.gold_labels.size(), 0);
    for (std::size_t i = 0; i < t.counts.size(); ++i)
        for (std::size_t g = 0; g < t.gold_labels.size(); ++g) {
            row_sums[i] += t.counts[i][g];
            col_sums[g] += t.counts[i][g];
        }

    double h_pred = 0.0;
    for (long long a : row_sums)
        if (a > 0) h_pred -= (a / n) * std::log(a / n);
    double h_gold = 0.0;
    for (long long b : col_sums)
        if (b > 0) h_gold -= (b / n) * std::log(b / n);
    if (h_pred + h_gold == 0.0) return 1.0;  // both sides single-cluster

    double mi = 0.0;
    for (std::size_t i = 0; i < t.counts.size(); ++i)
        for (std::size_t g = 0; g < t.gold_labels.size(); ++g) {
            const long long c = t.counts[i][g];
            if (c == 0) continue;
            mi += (c / n) * std::log(n * static_cast<double>(c) /
                                     (static_cast<double>(row_sums[i]) *
                                      static_cast<double>(col_sums[g])));
        }
    const double value = mi / ((h_pred + h_gold) / 2.0);
    return std::clamp(value, 0.0, 1.0);
}

double hungarian_accuracy(const Clustering& pred, const GoldLabeling& gold) {
    const ContingencyTable t = ContingencyTable::build(pred, gold);
    const MatchingResult m = max_weight_matching(t.counts);
    return static_cast<double>(m.total) / static_cast<double>(t.total);
}

MatchingResult max_weight_matching(const std::vector<std::vector<long long>>& weights) {
    const std::size_t rows = weights.size();
    const std::size_t cols = rows == 0 ? 0 : weights[0].size();
    for (const auto& row : weights) {
        if (row.size() != cols)
            throw parameter_error("max_weight_matching: ragged weight matrix");
        for (long long w : row)
            if (w < 0) throw parameter_error("max_weight_matching: negative weight");
    }
    MatchingResult result;
    result.row_to_col.assign(rows, -1);
    if (rows == 0 || cols == 0) return result;

    // Hungarian algorithm with potentials on min(rows, cols) assignments.
    // Weights are non-negative, so the best perfect matching of the smaller
    // side equals the best partial matching. Costs are negated weights.
    const bool transposed = rows > cols;
    const std::size_t n = transposed ? cols : rows;
    const std::size_t m = transposed ? rows : cols;
    auto weight_at = [&](std::size_t i, std::size_t j) {
        return transposed ? weights[j][i] : weights[i][j];
    };

    const long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(m + 1, 0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<long long> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            std::size_t j1 = 0;
            long long delta = inf;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const long long cur = -weight_at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] == 0) continue;
        const std::size_t i = p[j] - 1;
        if (transposed)
            result.row_to_col[j - 1] = static_cast<int>(i);
        else
            result.row_to_col[i] = static_cast<int>(j - 1);
        result.total += weight_at(i, j - 1);
    }
    return result;
}

Clustering compose_surface(const Clustering& pred_surface, const DocumentSet& docs) {
    if (!docs.canonicalization_mode())
        throw validation_error("compose_surface requires surface forms on every item");
    Clustering out;
    out.k = pred_surface.k;
    for (const Document& doc : docs.items()) {
        auto it = pred_surface.assignment.find(*doc.surface);
        if (it == pred_surface.assignment.end())
            throw validation_error("compose_surface: surface form '" + *doc.surface +
                                   "' of mention '" + doc.id + "' is not clustered");
        out.assignment.emplace(doc.id, it->second);
    }
    return out;
}

Clustering optimal_surface_clustering(const DocumentSet& docs) {
    if (!docs.canonicalization_mode())
        throw validation_error("optimal_surface_clustering requires surface forms");
    std::map<std::string, std::map<std::string, long long>> label_counts;  // surface -> label -> n
    for (const Document& doc : docs.items()) {
        if (!doc.gold)
            throw validation_error("optimal_surface_clustering: missing gold label on '" +
                                   doc.id + "'");
        ++label_counts[*doc.surface][*doc.gold];
    }
    // Majority label per surface; ties to the lexicographically smallest
    // label (map order gives that for free).
    std::map<std::string, std::string> chosen;
    std::map<std::string, int> label_index;
    for (const auto& [surface, counts] : label_counts) {
        long long best = -1;
        const std::string* best_label = nullptr;
        for (const auto& [label, count] : counts) {
            if (count > best) {
                best = count;
                best_label = &label;
            }
        }
        chosen.emplace(surface, *best_label);
        label_index.emplace(*best_label, 0);
    }
    int next = 0;
    for (auto& [label, idx] : label_index) idx = next++;
    Clustering out;
    out.k = static_cast<std::size_t>(next);
    for (const auto& [surface, label] : chosen)
        out.assignment.emplace(surface, label_index.at(label));
    return out;
}

}  // namespace fsc
