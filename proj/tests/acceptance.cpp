// Acceptance suite: one line of output per criterion, nonzero exit when any
// criterion fails. Criterion 9 needs an external dataset and reports SKIP
// unless FSC_OPIEC_DATA points at the converted dataset JSONL.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "fixtures.hpp"
#include "fsc/constraints.hpp"
#include "fsc/correct.hpp"
#include "fsc/cost.hpp"
#include "fsc/expand.hpp"
#include "fsc/jsonl.hpp"
#include "fsc/kmeans.hpp"
#include "fsc/metrics.hpp"
#include "fsc/oracle.hpp"
#include "fsc/pckmeans.hpp"
#include "fsc/prompts.hpp"
#include "fsc/rng.hpp"
#include "fsc/selection.hpp"

using namespace fsc;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    std::string title;
    Status status = Status::fail;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int places = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(places);
    os << v;
    return os.str();
}

// ---- shared instance / fixture helpers -------------------------------------

struct Instance {
    Clustering pred;
    GoldLabeling gold;
};

Instance instance_of(const std::vector<int>& pred, const std::vector<int>& gold) {
    Instance inst;
    int maxp = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const std::string id = fixtures::padded_id(i);
        inst.pred.assignment[id] = pred[i];
        maxp = std::max(maxp, pred[i]);
        inst.gold.labels[id] = "g" + std::to_string(gold[i]);
    }
    inst.pred.k = static_cast<std::size_t>(maxp + 1);
    return inst;
}

std::vector<std::string> make_ids(std::size_t n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(fixtures::padded_id(i));
    return ids;
}

EmbeddingMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    EmbeddingMatrix X(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t)
            X.row(i)[t] = static_cast<float>(uniform01(gen) * 20.0 - 10.0);
    return X;
}

// Explore-Consolidate with a gold oracle, splitting the budget like the CLI:
// half to explore (at least one query), the remainder to consolidate.
ConstraintSet gold_ec_constraints(const fixtures::Blobs& fx, std::size_t budget,
                                  std::uint64_t seed) {
    ConstraintSet cs;
    if (budget == 0) return cs;
    GoldOracle oracle(GoldLabeling::from_documents(fx.docs));
    const std::size_t explore_budget = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(static_cast<double>(budget) * 0.5)),
        std::size_t{1}, budget);
    SelectionResult ex = explore(fx.X, fx.docs, oracle, explore_budget, seed);
    std::vector<PairJudgment> judgments = ex.judgments;
    SelectionResult co = consolidate(fx.X, fx.docs, oracle, std::move(ex.neighborhoods),
                                     budget - judgments.size(), seed);
    judgments.insert(judgments.end(), co.judgments.begin(), co.judgments.end());
    return judgments_to_constraints(judgments, ConstraintSource::gold);
}

Centroids member_means(const EmbeddingMatrix& X, const DocumentSet& docs,
                       const Clustering& clustering) {
    Centroids c(clustering.k, X.d);
    std::vector<std::size_t> counts(clustering.k, 0);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const int j = clustering.at(docs[i].id);
        ++counts[j];
        const auto row = X.row(i);
        for (std::size_t t = 0; t < X.d; ++t) c.row(j)[t] += static_cast<double>(row[t]);
    }
    for (std::size_t j = 0; j < clustering.k; ++j)
        for (std::size_t t = 0; t < X.d; ++t) c.row(j)[t] /= static_cast<double>(counts[j]);
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- criterion 1: metrics vs independent brute-force oracles ---------------

Outcome criterion_metric_equivalence() {
    Outcome out{"metric oracle equivalence (1000 random instances)"};
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20260825);
    double max_nmi_drift = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 10);
        const int kp = 1 + static_cast<int>(uniform_index(rng, 4));
        const int kg = 1 + static_cast<int>(uniform_index(rng, 4));
        std::vector<int> pred(n), gold(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = static_cast<int>(uniform_index(rng, kp));
            gold[i] = static_cast<int>(uniform_index(rng, kg));
        }
        const Instance inst = instance_of(pred, gold);
        const Instance swapped = instance_of(gold, pred);

        const PRF ma = macro_prf(inst.pred, inst.gold);
        const PRF mi = micro_prf(inst.pred, inst.gold);
        const PRF pa = pair_prf(inst.pred, inst.gold);
        const double nm = nmi(inst.pred, inst.gold);
        const double acc = hungarian_accuracy(inst.pred, inst.gold);

        const brute::PR bma = brute::macro_pr(pred, gold);
        const brute::PR bmi = brute::micro_pr(pred, gold);
        const brute::PR bpa = brute::pair_pr(pred, gold);
        const double bnm = brute::nmi(pred, gold);
        const double bacc = brute::hungarian_accuracy(pred, gold);

        const auto exact = [](const PRF& got, const brute::PR& want) {
            return got.precision == want.precision && got.recall == want.recall &&
                   got.f1 == brute::f1_of(want);
        };
        if (!exact(ma, bma)) {
            out.detail = "macro mismatch at trial " + std::to_string(trial);
            return out;
        }
        if (!exact(mi, bmi)) {
            out.detail = "micro mismatch at trial " + std::to_string(trial);
            return out;
        }
        if (!exact(pa, bpa)) {
            out.detail = "pairwise mismatch at trial " + std::to_string(trial);
            return out;
        }
        if (acc != bacc) {
            out.detail = "hungarian accuracy mismatch at trial " + std::to_string(trial);
            return out;
        }
        max_nmi_drift = std::max(max_nmi_drift, std::abs(nm - bnm));
        max_nmi_drift = std::max(max_nmi_drift, std::abs(nm - nmi(swapped.pred, swapped.gold)));
        if (max_nmi_drift > 1e-9) {
            out.detail = "NMI drift " + std::to_string(max_nmi_drift) + " at trial " +
                         std::to_string(trial);
            return out;
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 30.0) {
        out.detail = "runtime " + fmt(elapsed, 1) + "s exceeds the 30s budget";
        return out;
    }
    out.status = Status::pass;
    std::ostringstream drift;
    drift.setf(std::ios::scientific);
    drift.precision(1);
    drift << max_nmi_drift;
    out.detail = "integer-ratio metrics exact; max NMI drift " + drift.str() + "; " +
                 fmt(elapsed, 1) + "s < 30s";
    return out;
}

// ---- criterion 2: worked-example regression ---------------------------------

Outcome criterion_worked_examples() {
    Outcome out{"worked-example regression"};
    const Instance one_cluster = instance_of({0, 0, 0}, {0, 0, 1});
    const PRF pa = pair_prf(one_cluster.pred, one_cluster.gold);
    const PRF mi = micro_prf(one_cluster.pred, one_cluster.gold);
    const double acc = hungarian_accuracy(one_cluster.pred, one_cluster.gold);
    const Instance split = instance_of({0, 0, 1, 2}, {0, 0, 1, 1});
    const double nm = nmi(split.pred, split.gold);

    const auto close = [](double got, double want, double tol) {
        return std::abs(got - want) <= tol;
    };
    if (!close(pa.precision, 1.0 / 3.0, 1e-12) || !close(pa.recall, 1.0, 1e-12)) {
        out.detail = "pairwise P/R " + fmt(pa.precision) + "/" + fmt(pa.recall) +
                     " != 1/3, 1";
        return out;
    }
    if (!close(mi.precision, 2.0 / 3.0, 1e-12) || !close(mi.recall, 1.0, 1e-12)) {
        out.detail = "micro P/R " + fmt(mi.precision) + "/" + fmt(mi.recall) + " != 2/3, 1";
        return out;
    }
    if (!close(acc, 2.0 / 3.0, 1e-12)) {
        out.detail = "hungarian accuracy " + fmt(acc) + " != 2/3";
        return out;
    }
    if (!close(nm, 0.8, 1e-4)) {
        out.detail = "NMI " + fmt(nm) + " != 0.8000 +/- 1e-4";
        return out;
    }
    out.status = Status::pass;
    out.detail = "pair 1/3 & 1, micro 2/3 & 1, accuracy 2/3, NMI " + fmt(nm);
    return out;
}

// ---- criterion 3: k-means monotonicity + exhaustive optimum -----------------

Outcome criterion_kmeans() {
    Outcome out{"k-means inertia monotone + exhaustive optimum"};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 8 + seed % 30;
        const std::size_t d = 1 + seed % 5;
        const std::size_t k = std::min<std::size_t>(n, 2 + seed % 6);
        const EmbeddingMatrix X = random_matrix(n, d, 1000 + seed);
        const KMeansResult res =
            lloyd(X, kmeanspp_init(X, k, seed), make_ids(n));
        for (std::size_t i = 1; i < res.inertia_history.size(); ++i) {
            if (res.inertia_history[i] > res.inertia_history[i - 1] + 1e-9) {
                out.detail = "inertia rose on fixture " + std::to_string(seed) +
                             " at iteration " + std::to_string(i);
                return out;
            }
        }
    }
    double max_gap = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 4 + seed % 9;   // <= 12
        const std::size_t k = 1 + seed % 3;   // <= 3
        const std::size_t d = 1 + seed % 3;
        const EmbeddingMatrix X = random_matrix(n, d, 5000 + seed);
        std::vector<std::vector<double>> pts(n, std::vector<double>(d));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < d; ++t) pts[i][t] = static_cast<double>(X.row(i)[t]);
        const brute::KMeansOptimum opt = brute::kmeans_optimum(pts, k);
        Centroids init(k, d);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t t = 0; t < d; ++t) init.row(j)[t] = opt.centroids[j][t];
        const KMeansResult res = lloyd(X, init, make_ids(n));
        const double gap = std::abs(res.inertia - opt.inertia);
        max_gap = std::max(max_gap, gap);
        if (gap > 1e-9) {
            out.detail = "optimal-start inertia off by " + std::to_string(gap) +
                         " on fixture " + std::to_string(seed);
            return out;
        }
    }
    out.status = Status::pass;
    std::ostringstream gap;
    gap.setf(std::ios::scientific);
    gap.precision(1);
    gap << max_gap;
    out.detail = "100 fixtures monotone; 30 exhaustive optima matched (max gap " + gap.str() +
                 ")";
    return out;
}

// ---- criterion 4: PCKMeans reduction + constrained recovery -----------------

Outcome criterion_pckmeans(const fixtures::Blobs& fx) {
    Outcome out{"pckmeans reduction + constrained recovery"};
    const auto t0 = Clock::now();
    const auto ids = fx.docs.ids();
    const ConstraintSet empty;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        PCKMeansParams params;
        params.k = 4;
        params.w = 1.7;
        params.seed = seed;
        const PCKMeansResult constrained = pckmeans(fx.X, empty, ids, params);
        const KMeansResult plain = lloyd(fx.X, kmeanspp_init(fx.X, 4, seed), ids);
        if (constrained.clustering.assignment != plain.clustering.assignment ||
            !(constrained.centroids == plain.centroids) ||
            constrained.inertia != plain.inertia) {
            out.detail = "budget-0 run differs from k-means at seed " + std::to_string(seed);
            return out;
        }
    }

    const ConstraintSet cs = gold_ec_constraints(fx, 50, 0);
    if (cs.empty() || cs.size() > 50) {
        out.detail = "explore-consolidate yielded " + std::to_string(cs.size()) +
                     " constraints from a budget of 50";
        return out;
    }
    const GoldLabeling gold = GoldLabeling::from_documents(fx.docs);
    PCKMeansParams tune_params;
    tune_params.k = 4;
    tune_params.seed = 0;
    const std::vector<double> grid = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
    const double w = tune_w(fx.X, cs, gold, ids, grid, tune_params, TaskMode::text);

    double acc_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        PCKMeansParams params;
        params.k = 4;
        params.w = w;
        params.seed = seed;
        acc_sum += hungarian_accuracy(pckmeans(fx.X, cs, ids, params).clustering, gold);
    }
    const double mean_acc = acc_sum / 5.0;
    const double elapsed = seconds_since(t0);
    if (mean_acc < 1.0 - 1e-12) {
        out.detail = "5-seed mean accuracy " + fmt(mean_acc) + " != 1.0 (w=" + fmt(w, 3) + ")";
        return out;
    }
    if (elapsed >= 10.0) {
        out.detail = "runtime " + fmt(elapsed, 1) + "s exceeds the 10s budget";
        return out;
    }
    out.status = Status::pass;
    out.detail = "reduction bit-identical on 5 seeds; " + std::to_string(cs.size()) +
                 " constraints, w=" + fmt(w, 3) + ", mean accuracy 1.0; " + fmt(elapsed, 1) +
                 "s < 10s";
    return out;
}

// ---- criterion 5: feedback-curve trend --------------------------------------

Outcome criterion_curve(const fixtures::Blobs& fx) {
    Outcome out{"feedback-curve macro F1 trend"};
    const auto ids = fx.docs.ids();
    const GoldLabeling gold = GoldLabeling::from_documents(fx.docs);
    const std::vector<std::size_t> budgets = {0, 50, 100, 200};
    std::vector<double> means;
    for (const std::size_t budget : budgets) {
        double sum = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const ConstraintSet cs = gold_ec_constraints(fx, budget, seed);
            PCKMeansParams params;
            params.k = 4;
            params.w = 1.0;
            params.seed = seed;
            sum += macro_prf(pckmeans(fx.X, cs, ids, params).clustering, gold).f1;
        }
        means.push_back(sum / 5.0);
    }
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (means[i] < means[i - 1] - 0.02) {
            out.detail = "mean macro F1 fell from " + fmt(means[i - 1]) + " to " +
                         fmt(means[i]) + " at budget " + std::to_string(budgets[i]);
            return out;
        }
    }
    out.status = Status::pass;
    out.detail = "budgets {0,50,100,200} -> means " + fmt(means[0]) + ", " + fmt(means[1]) +
                 ", " + fmt(means[2]) + ", " + fmt(means[3]) + " (non-decreasing within 0.02)";
    return out;
}

// ---- criterion 6: correction safety ------------------------------------------

Outcome criterion_correction() {
    Outcome out{"correction repairs injected misassignments only"};
    // Six clusters of ten points on a line (cluster j near j*100 on axis 0),
    // so each cluster's nearest neighbor is unambiguous.
    fixtures::Blobs fx = fixtures::make_blobs(60, 6, 4, 9);
    std::mt19937_64 noise(42);
    for (std::size_t i = 0; i < fx.X.n; ++i)
        for (std::size_t t = 0; t < fx.X.d; ++t)
            fx.X.row(i)[t] = static_cast<float>((t == 0 ? (i % 6) * 100.0 : 0.0) +
                                                uniform01(noise) * 2.0 - 1.0);
    const GoldLabeling gold = GoldLabeling::from_documents(fx.docs);
    const auto gold_index = [](const std::string& label) {
        return std::stoi(label.substr(1));  // labels are c0..c5
    };

    Clustering truth;
    truth.k = 6;
    for (const Document& doc : fx.docs.items())
        truth.assignment[doc.id] = gold_index(*doc.gold);
    const Centroids clean_means = member_means(fx.X, fx.docs, truth);

    // Move ten points to just past the midpoint toward the adjacent cluster
    // and assign them there: genuinely low-margin, genuinely wrong.
    Clustering injected_clustering = truth;
    std::set<std::string> injected_ids;
    std::map<std::string, int> true_cluster;
    for (std::size_t i = 0; i < 10; ++i) {
        const std::string id = fx.docs[i].id;
        const int a = gold_index(*fx.docs[i].gold);
        const int b = a < 5 ? a + 1 : a - 1;
        for (std::size_t t = 0; t < fx.X.d; ++t) {
            const double va = clean_means.row(a)[t];
            const double vb = clean_means.row(b)[t];
            fx.X.row(i)[t] = static_cast<float>(va + 0.52 * (vb - va));
        }
        injected_clustering.assignment[id] = b;
        injected_ids.insert(id);
        true_cluster[id] = a;
    }

    const Centroids centroids = member_means(fx.X, fx.docs, injected_clustering);
    const CorrectionPlan p = plan(fx.X, fx.docs, injected_clustering, centroids, 10, 4);
    std::set<std::string> planned;
    for (const auto& cand : p.candidates) planned.insert(cand.id);
    if (planned != injected_ids) {
        out.detail = "the 10 lowest-margin points are not the 10 injected ones";
        return out;
    }

    const auto reps = representatives(fx.X, fx.docs, injected_clustering, 3);
    GoldOracle oracle(gold);
    const CorrectionResult result = correct(p, injected_clustering, oracle, fx.docs, reps);

    int total_queries = 0;
    for (const auto& rec : result.log) {
        total_queries += rec.queries;
        if (!rec.to.has_value() || *rec.to != true_cluster.at(rec.id)) {
            out.detail = "candidate '" + rec.id + "' was not returned to its true cluster";
            return out;
        }
    }
    if (result.clustering.assignment != truth.assignment) {
        out.detail = "correction changed points outside the injected set";
        return out;
    }
    if (total_queries > 50) {
        out.detail = std::to_string(total_queries) + " queries exceed the 10*5 budget";
        return out;
    }
    out.status = Status::pass;
    out.detail = "all 10 repaired, nothing else moved, " + std::to_string(total_queries) +
                 " queries <= 50";
    return out;
}

// ---- criterion 7: oracle determinism & exact cost ----------------------------

class DeterministicTransport : public Transport {
public:
    std::atomic<int> calls{0};

    TransportResult complete(const OracleConfig&, const std::string& prompt,
                             const std::string&) override {
        ++calls;
        TransportResult r;
        switch (prompt.size() % 3) {
            case 0: r.text = "yes, same cluster."; break;
            case 1: r.text = "No. These differ."; break;
            default: r.text = "cannot tell from the given contexts"; break;
        }
        r.tokens_in = static_cast<std::int64_t>(prompt.size() / 4 + 1);
        r.tokens_out = static_cast<std::int64_t>(r.text.size() / 4 + 1);
        return r;
    }
};

Outcome criterion_oracle_cost() {
    Outcome out{"oracle determinism + exact decimal cost"};

    // Exact-decimal ledger arithmetic on the module's unit prices.
    {
        CostLedger ledger(Usd::parse("0.0015"), Usd::parse("0.002"));
        ledger.record("h1", 1000, 500, false);
        ledger.record("h2", 333, 111, false);
        ledger.record("h1", 1000, 500, true);
        const LedgerTotals t = ledger.totals();
        if (t.usd.str() != "0.0032215" || t.usd != Usd::parse("0.0032215")) {
            out.detail = "ledger total " + t.usd.str() + " != 0.0032215 exactly";
            return out;
        }
    }

    const auto dir = fixtures::temp_dir("acceptance_oracle");
    // Text lengths vary so the mock transport's prompt-length rule produces
    // all three answer kinds across the pair set.
    std::vector<Document> raw_docs;
    for (std::size_t i = 0; i < 8; ++i) {
        Document d;
        d.id = "e" + std::to_string(i);
        d.text = std::string(i + 1, 'x');
        d.gold = "g" + std::to_string(i % 3);
        raw_docs.push_back(std::move(d));
    }
    const DocumentSet docs(std::move(raw_docs));

    const PromptTemplate tmpl = PromptTemplate::parse(
        R"({"instruction": "Decide whether the two items belong together.",
            "pair_frame": "Item 1: {entity1}\n{contexts1}\nItem 2: {entity2}\n{contexts2}\nSame?",
            "keyphrase_frame": "Keyphrases for: {text}"})",
        "acceptance template");

    std::vector<PairQuery> queries;
    for (int i = 0; i < 8 && queries.size() < 15; ++i)
        for (int j = i + 1; j < 8 && queries.size() < 15; ++j)
            queries.emplace_back("e" + std::to_string(i), "e" + std::to_string(j),
                                 QueryPhase::explore);

    OracleConfig cfg;
    cfg.endpoint = "http://mock.invalid/v1/chat/completions";
    cfg.model = "acceptance-mock";
    cfg.price_in = Usd::parse("0.0015");
    cfg.price_out = Usd::parse("0.002");

    const std::string cache_path = (dir / "cache.jsonl").string();
    const std::string live_file = (dir / "live.jsonl").string();
    const std::string replay_file = (dir / "replay.jsonl").string();
    DeterministicTransport transport;
    std::vector<PairJudgment> live;
    {
        ResponseCache cache(cache_path);
        CostLedger ledger(cfg.price_in, cfg.price_out);
        LlmOracle oracle(cfg, tmpl, docs, transport, cache, ledger);
        live = oracle.judge_all(queries);
        save_constraints(live_file, judgments_to_constraints(live, ConstraintSource::llm).all());

        if (transport.calls != 15) {
            out.detail = "live run made " + std::to_string(transport.calls.load()) +
                         " transport calls for 15 distinct queries";
            return out;
        }
        // The ledger must equal per-token integer arithmetic over the cache.
        std::int64_t in_tokens = 0, out_tokens = 0;
        for (const CacheRecord& rec : cache.records()) {
            in_tokens += rec.tokens_in;
            out_tokens += rec.tokens_out;
        }
        const std::int64_t expected_pico = in_tokens * 1'500'000 + out_tokens * 2'000'000;
        if (ledger.totals().usd.pico() != expected_pico) {
            out.detail = "ledger " + ledger.totals().usd.str() +
                         " differs from per-token integer arithmetic";
            return out;
        }
    }

    int live_must = 0, live_cannot = 0, live_abstain = 0;
    for (const PairJudgment& j : live) {
        if (j.answer == Answer::must_link) ++live_must;
        if (j.answer == Answer::cannot_link) ++live_cannot;
        if (j.answer == Answer::abstain) ++live_abstain;
    }
    if (live_must == 0 || live_cannot == 0 || live_abstain == 0) {
        out.detail = "mock transcript lacks an answer kind (must/cannot/abstain = " +
                     std::to_string(live_must) + "/" + std::to_string(live_cannot) + "/" +
                     std::to_string(live_abstain) + ")";
        return out;
    }

    // Replay: identical judgments, identical bytes, and no transport at all.
    {
        const ResponseCache cache(cache_path);
        CostLedger ledger(cfg.price_in, cfg.price_out);
        ReplayOracle oracle(cfg, tmpl, docs, cache, ledger);
        const std::vector<PairJudgment> replayed = oracle.judge_all(queries);
        save_constraints(replay_file,
                         judgments_to_constraints(replayed, ConstraintSource::llm).all());
        for (std::size_t i = 0; i < queries.size(); ++i) {
            if (replayed[i].answer != live[i].answer ||
                replayed[i].raw_response != live[i].raw_response || !replayed[i].cached) {
                out.detail = "replayed judgment " + std::to_string(i) +
                             " differs from the live run";
                return out;
            }
        }
        if (transport.calls != 15) {
            out.detail = "replay touched the transport";
            return out;
        }
        if (ledger.totals().usd.pico() != 0) {
            out.detail = "replay spent " + ledger.totals().usd.str();
            return out;
        }
    }
    if (slurp(live_file) != slurp(replay_file)) {
        out.detail = "live and replayed constraint files differ";
        return out;
    }
    const std::string constraint_bytes = slurp(live_file);
    if (constraint_bytes.find("abstain") != std::string::npos) {
        out.detail = "constraint file mentions abstain";
        return out;
    }
    const auto reloaded = load_constraint_list(live_file);
    if (reloaded.size() != static_cast<std::size_t>(live_must + live_cannot)) {
        out.detail = "constraint file holds " + std::to_string(reloaded.size()) +
                     " entries, expected " + std::to_string(live_must + live_cannot);
        return out;
    }
    out.status = Status::pass;
    out.detail = "replay byte-identical, zero transport calls, ledger integer-exact, " +
                 std::to_string(live_abstain) + " abstains excluded from constraints";
    return out;
}

// ---- criterion 8: keyphrase expansion pipeline -------------------------------

Outcome criterion_expansion() {
    Outcome out{"keyphrase expansion dimensions + accuracy"};
    // Dimension additivity across shapes and both concat modes.
    for (const auto& [d1, d2] : std::vector<std::pair<std::size_t, std::size_t>>{
             {4, 3}, {8, 6}, {2, 1}}) {
        const EmbeddingMatrix base = random_matrix(10, d1, 11);
        const EmbeddingMatrix keys = random_matrix(10, d2, 12);
        for (const ConcatMode mode : {ConcatMode::l2_each_part, ConcatMode::raw_concat}) {
            const ExpandedMatrix ex = expand_representation(base, keys, mode);
            if (ex.combined.d != d1 + d2 || ex.combined.n != 10) {
                out.detail = "combined shape wrong for d1=" + std::to_string(d1) +
                             ", d2=" + std::to_string(d2);
                return out;
            }
        }
    }

    // Mock provider: identical keyphrase vector within a gold cluster,
    // orthogonal across clusters. Accuracy must not drop vs the base view.
    const fixtures::Blobs fx = fixtures::make_blobs(80, 4, 6, 77, 7.0, 2.5);
    const auto ids = fx.docs.ids();
    const GoldLabeling gold = GoldLabeling::from_documents(fx.docs);
    EmbeddingMatrix keyvecs(fx.X.n, 4);
    for (std::size_t i = 0; i < fx.docs.size(); ++i)
        keyvecs.row(i)[std::stoi(fx.docs[i].gold->substr(1))] = 1.0f;
    const ExpandedMatrix ex = expand_representation(fx.X, keyvecs, ConcatMode::l2_each_part);

    double base_sum = 0.0, combined_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        base_sum += hungarian_accuracy(
            lloyd(fx.X, kmeanspp_init(fx.X, 4, seed), ids).clustering, gold);
        combined_sum += hungarian_accuracy(
            lloyd(ex.combined, kmeanspp_init(ex.combined, 4, seed), ids).clustering, gold);
    }
    const double base_mean = base_sum / 5.0;
    const double combined_mean = combined_sum / 5.0;
    if (combined_mean < base_mean - 0.02) {
        out.detail = "combined accuracy " + fmt(combined_mean) + " fell below base " +
                     fmt(base_mean) + " - 0.02";
        return out;
    }
    out.status = Status::pass;
    out.detail = "dims additive on 6 shapes; 5-seed accuracy base " + fmt(base_mean) +
                 " -> combined " + fmt(combined_mean);
    return out;
}

// ---- criterion 9: optional OPIEC59k integration -------------------------------

Outcome criterion_opiec() {
    Outcome out{"OPIEC59k optimal surface clustering (optional)"};
    const char* path = std::getenv("FSC_OPIEC_DATA");
    if (path == nullptr || *path == '\0') {
        out.status = Status::skip;
        out.detail = "set FSC_OPIEC_DATA=<converted dataset JSONL> to run";
        return out;
    }
    const DocumentSet docs = load_dataset(path);
    const GoldLabeling gold = GoldLabeling::from_documents(docs);
    const Clustering mentions = compose_surface(optimal_surface_clustering(docs), docs);
    const double macro = macro_prf(mentions, gold).f1 * 100.0;
    const double micro = micro_prf(mentions, gold).f1 * 100.0;
    const double pair = pair_prf(mentions, gold).f1 * 100.0;
    const std::string got =
        "macro/micro/pair F1 = " + fmt(macro, 1) + "/" + fmt(micro, 1) + "/" + fmt(pair, 1);
    if (std::abs(macro - 80.3) > 0.5 || std::abs(micro - 97.0) > 0.5 ||
        std::abs(pair - 95.5) > 0.5) {
        out.detail = got + " outside 80.3/97.0/95.5 +/- 0.5";
        return out;
    }
    out.status = Status::pass;
    out.detail = got + " within 0.5 of 80.3/97.0/95.5";
    return out;
}

}  // namespace

int main() {
    const fixtures::Blobs separable = fixtures::make_blobs(100, 4, 8, 1234);
    const std::vector<std::function<Outcome()>> criteria = {
        criterion_metric_equivalence,
        criterion_worked_examples,
        criterion_kmeans,
        [&] { return criterion_pckmeans(separable); },
        [&] { return criterion_curve(separable); },
        criterion_correction,
        criterion_oracle_cost,
        criterion_expansion,
        criterion_opiec,
    };

    std::printf("fsc acceptance suite\n");
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i]();
        } catch (const std::exception& e) {
            out.status = Status::fail;
            out.detail = std::string("unexpected exception: ") + e.what();
            out.title = out.title.empty() ? "criterion threw" : out.title;
        }
        const char* tag = out.status == Status::pass ? "PASS"
                          : out.status == Status::skip ? "SKIP"
                                                       : "FAIL";
        if (out.status == Status::fail) ++failures;
        std::printf("%s  %zu. %s — %s\n", tag, i + 1, out.title.c_str(), out.detail.c_str());
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed (optional ones may be skipped)\n");
    return 0;
}
