#include "fsc/correct.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace fsc {

namespace {

void check_paired(const EmbeddingMatrix& X, const DocumentSet& docs) {
    if (X.n != docs.size())
        throw validation_error("embedding row count " + std::to_string(X.n) +
                               " does not match document count " + std::to_string(docs.size()));
}

}  // namespace

std::vector<std::vector<std::string>> representatives(const EmbeddingMatrix& X,
                                                      const DocumentSet& docs,
                                                      const Clustering& clustering,
                                                      std::size_t r) {
    check_paired(X, docs);
    if (r < 1) throw parameter_error("representatives: r must be >= 1");

    std::vector<std::vector<std::size_t>> members(clustering.k);
    for (const Document& doc : docs.items()) {
        const int cluster = clustering.at(doc.id);
        if (cluster < 0 || static_cast<std::size_t>(cluster) >= clustering.k)
            throw validation_error("cluster index out of range for id '" + doc.id + "'");
        members[cluster].push_back(docs.index_of(doc.id));
    }

    std::vector<std::vector<std::string>> out(clustering.k);
    for (std::size_t j = 0; j < clustering.k; ++j) {
        if (members[j].empty()) continue;
        std::vector<double> mean(X.d, 0.0);
        for (std::size_t i : members[j]) {
            const auto row = X.row(i);
            for (std::size_t t = 0; t < X.d; ++t) mean[t] += static_cast<double>(row[t]);
        }
        for (double& m : mean) m /= static_cast<double>(members[j].size());

        std::vector<std::pair<double, std::string>> ranked;
        ranked.reserve(members[j].size());
        for (std::size_t i : members[j]) {
            const auto row = X.row(i);
            double s = 0.0;
            for (std::size_t t = 0; t < X.d; ++t) {
                const double diff = static_cast<double>(row[t]) - mean[t];
                s += diff * diff;
            }
            ranked.emplace_back(s, docs[i].id);
        }
        std::sort(ranked.begin(), ranked.end());
        const std::size_t take = std::min(r, ranked.size());
        for (std::size_t t = 0; t < take; ++t) out[j].push_back(ranked[t].second);
    }
    return out;
}

CorrectionPlan plan(const EmbeddingMatrix& X, const DocumentSet& docs,
                    const Clustering& clustering, const Centroids& centroids, std::size_t k_low,
                    std::size_t n_alt) {
    check_paired(X, docs);
    if (centroids.k < 2) throw parameter_error("plan: need k >= 2 clusters for margins");
    if (centroids.d != X.d) throw parameter_error("plan: centroid dimension mismatch");
    if (k_low > X.n)
        throw parameter_error("plan: k_low " + std::to_string(k_low) + " exceeds n " +
                              std::to_string(X.n));

    const std::vector<double> point_margins = margins(X, centroids);
    std::vector<std::pair<double, std::string>> ranked;
    ranked.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        ranked.emplace_back(point_margins[i], docs[i].id);
    std::sort(ranked.begin(), ranked.end());
    ranked.resize(k_low);

    CorrectionPlan out;
    out.candidates.reserve(k_low);
    for (const auto& [margin, id] : ranked) {
        CorrectionCandidate c;
        c.id = id;
        c.margin = margin;
        c.current = clustering.at(id);
        const std::vector<int> order =
            nearest_clusters(X.row(docs.index_of(id)), centroids, centroids.k);
        for (int cluster : order) {
            if (cluster == c.current) continue;
            c.alternatives.push_back(cluster);
            if (c.alternatives.size() == n_alt) break;
        }
        out.candidates.push_back(std::move(c));
    }
    return out;
}

CorrectionResult correct(const CorrectionPlan& plan, const Clustering& clustering,
                         PairOracle& oracle, const DocumentSet& docs,
                         const std::vector<std::vector<std::string>>& cluster_representatives) {
    CorrectionResult result;
    result.clustering = clustering;

    auto reps_of = [&](int cluster) -> const std::vector<std::string>* {
        if (cluster < 0 || static_cast<std::size_t>(cluster) >= cluster_representatives.size())
            throw validation_error("correction plan references cluster " +
                                   std::to_string(cluster) + " with no representative list");
        const auto& reps = cluster_representatives[cluster];
        return reps.empty() ? nullptr : &reps;
    };

    for (const CorrectionCandidate& cand : plan.candidates) {
        if (!docs.contains(cand.id))
            throw validation_error("correction plan names unknown id '" + cand.id + "'");
        ReassignmentRecord rec;
        rec.id = cand.id;
        rec.from = cand.current;
        try {
            const std::vector<std::string>* current_reps = reps_of(cand.current);
            if (current_reps == nullptr)
                throw validation_error("candidate '" + cand.id +
                                       "' sits in a cluster with no representatives");
            const MembershipJudgment own =
                oracle.judge_membership(cand.id, *current_reps);
            ++rec.queries;
            rec.answers.emplace_back(to_string(own.answer));
            if (own.answer == Answer::cannot_link) {
                // Rejected at home: walk the alternatives nearest-first.
                for (int alt : cand.alternatives) {
                    const std::vector<std::string>* alt_reps = reps_of(alt);
                    if (alt_reps == nullptr) continue;  // empty cluster, nothing to show
                    const MembershipJudgment j = oracle.judge_membership(cand.id, *alt_reps);
                    ++rec.queries;
                    rec.answers.emplace_back(to_string(j.answer));
                    if (j.answer == Answer::must_link) {
                        rec.to = alt;
                        result.clustering.assignment[cand.id] = alt;
                        break;
                    }
                }
            }
        } catch (const transport_error& e) {
            rec.transport_failed = true;  // candidate kept, pass continues
            std::cerr << "warning: correction skipped candidate '" << cand.id
                      << "' after transport failure: " << e.what() << "\n";
        }
        result.log.push_back(std::move(rec));
    }
    return result;
}

}  // namespace fsc
