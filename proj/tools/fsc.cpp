// fsc: few-shot semi-supervised clustering toolkit.
//
// Subcommands cover the full pipeline: keyphrase expansion before
// clustering, pair selection + pseudo-oracle labeling + constrained
// clustering during, low-confidence correction after, and evaluation /
// cost accounting around it. All randomness flows from --seeds; gold and
// replay oracles make every pipeline fully deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsc/constraints.hpp"
#include "fsc/correct.hpp"
#include "fsc/cost.hpp"
#include "fsc/error.hpp"
#include "fsc/expand.hpp"
#include "fsc/jsonl.hpp"
#include "fsc/kmeans.hpp"
#include "fsc/metrics.hpp"
#include "fsc/oracle.hpp"
#include "fsc/pckmeans.hpp"
#include "fsc/prompts.hpp"
#include "fsc/selection.hpp"
#include "fsc/types.hpp"

namespace {

using nlohmann::json;
using namespace fsc;

// ---------------------------------------------------------------- config

// The config file is one JSON object; flags override its fields. It is
// pre-scanned before CLI11 runs so config values act as option defaults.
json load_config_from_argv(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::parse_error& e) {
        throw config_error(path + ": not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw config_error(path + ": config must be a JSON object");
    return cfg;
}

template <typename T>
T cfg_get(const json& cfg, const std::string& key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error("config field '" + key + "' has the wrong type");
    }
}

// Prices must stay exact: accept strings verbatim; numbers go through the
// round-trip dump, which reproduces the literal for human-entered values.
std::string cfg_price(const json& cfg, const std::string& key, std::string fallback) {
    if (!cfg.contains(key)) return fallback;
    const json& v = cfg.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        std::string s = v.dump();
        if (s.find('e') != std::string::npos || s.find('E') != std::string::npos)
            throw config_error("config field '" + key +
                               "': write tiny prices as strings, not scientific notation");
        return s;
    }
    throw config_error("config field '" + key + "' must be a decimal string or number");
}

// ---------------------------------------------------------------- parsing

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const std::string& what) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                out.push_back(std::stoull(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw validation_error(what + ": '" + item + "' is not a non-negative integer");
            }
        }
        pos = comma + 1;
    }
    if (out.empty()) throw validation_error(what + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw validation_error(what + ": '" + item + "' is not a number");
            }
        }
        pos = comma + 1;
    }
    if (out.empty()) throw validation_error(what + ": empty list");
    return out;
}

void require_value(const std::string& value, const std::string& flag) {
    if (value.empty())
        throw validation_error(flag + " is required (pass the flag or set it in --config)");
}

// ---------------------------------------------------------------- oracle

struct OracleOptions {
    std::string kind = "gold";
    std::string templates;
    std::string cache;
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    int max_retries = 3;
    int backoff_ms = 250;
    std::string price_in = "0";
    std::string price_out = "0";
    int max_concurrent = 4;
    std::string api_key_env = "FSC_API_KEY";
};

void add_oracle_options(CLI::App* sub, OracleOptions& o, const json& cfg) {
    o.kind = cfg_get<std::string>(cfg, "oracle", o.kind);
    o.templates = cfg_get<std::string>(cfg, "templates", o.templates);
    o.cache = cfg_get<std::string>(cfg, "cache", o.cache);
    o.endpoint = cfg_get<std::string>(cfg, "endpoint", o.endpoint);
    o.model = cfg_get<std::string>(cfg, "model", o.model);
    o.temperature = cfg_get<double>(cfg, "temperature", o.temperature);
    o.max_retries = cfg_get<int>(cfg, "max_retries", o.max_retries);
    o.backoff_ms = cfg_get<int>(cfg, "backoff_ms", o.backoff_ms);
    o.price_in = cfg_price(cfg, "price_in", o.price_in);
    o.price_out = cfg_price(cfg, "price_out", o.price_out);
    o.max_concurrent = cfg_get<int>(cfg, "max_concurrent", o.max_concurrent);
    o.api_key_env = cfg_get<std::string>(cfg, "api_key_env", o.api_key_env);

    sub->add_option("--oracle", o.kind, "oracle kind: gold | llm | replay");
    sub->add_option("--templates", o.templates, "prompt template JSON file");
    sub->add_option("--cache", o.cache, "oracle response cache file (line-delimited JSON)");
    sub->add_option("--endpoint", o.endpoint, "chat-completions endpoint URL");
    sub->add_option("--model", o.model, "model name sent with every request");
    sub->add_option("--temperature", o.temperature, "sampling temperature (default 0)");
    sub->add_option("--max-retries", o.max_retries, "transport retries after the first attempt");
    sub->add_option("--backoff-ms", o.backoff_ms, "base retry backoff in milliseconds");
    sub->add_option("--price-in", o.price_in, "USD per 1K prompt tokens (plain decimal)");
    sub->add_option("--price-out", o.price_out, "USD per 1K completion tokens (plain decimal)");
    sub->add_option("--max-concurrent", o.max_concurrent, "in-flight oracle request bound");
    sub->add_option("--api-key-env", o.api_key_env,
                    "environment variable holding the API credential");
}

struct OracleBundle {
    OracleConfig cfg;
    std::unique_ptr<ResponseCache> cache;
    std::unique_ptr<CostLedger> ledger;
    std::unique_ptr<HttpTransport> transport;
    std::unique_ptr<PairOracle> pair;
    KeyphraseGenerator* keyphrases = nullptr;  // null when the kind cannot generate
};

ConstraintSource source_of_kind(const std::string& kind) {
    if (kind == "gold") return ConstraintSource::gold;
    if (kind == "replay") return ConstraintSource::replay;
    return ConstraintSource::llm;
}

OracleBundle make_oracle(const OracleOptions& o, const DocumentSet& docs) {
    OracleBundle b;
    b.cache = o.cache.empty() ? std::make_unique<ResponseCache>()
                              : std::make_unique<ResponseCache>(o.cache);
    b.ledger = std::make_unique<CostLedger>(Usd::parse(o.price_in), Usd::parse(o.price_out));

    if (o.kind == "gold") {
        if (!docs.fully_labeled())
            throw validation_error("gold oracle requires gold labels on every item");
        b.pair = std::make_unique<GoldOracle>(GoldLabeling::from_documents(docs));
        return b;
    }

    b.cfg.endpoint = o.endpoint;
    b.cfg.model = o.model;
    b.cfg.temperature = o.temperature;
    b.cfg.max_retries = o.max_retries;
    b.cfg.backoff_base = std::chrono::milliseconds(o.backoff_ms);
    b.cfg.price_in = Usd::parse(o.price_in);
    b.cfg.price_out = Usd::parse(o.price_out);
    b.cfg.max_concurrent = o.max_concurrent;
    b.cfg.api_key_env = o.api_key_env;
    require_value(o.templates, "--templates");
    PromptTemplate tmpl = PromptTemplate::load(o.templates);

    if (o.kind == "llm") {
        require_value(o.endpoint, "--endpoint");
        require_value(o.model, "--model");
        b.transport = std::make_unique<HttpTransport>();
        auto llm = std::make_unique<LlmOracle>(b.cfg, std::move(tmpl), docs, *b.transport,
                                               *b.cache, *b.ledger);
        b.keyphrases = llm.get();
        b.pair = std::move(llm);
        return b;
    }
    if (o.kind == "replay") {
        require_value(o.model, "--model");
        require_value(o.cache, "--cache");
        auto replay =
            std::make_unique<ReplayOracle>(b.cfg, std::move(tmpl), docs, *b.cache, *b.ledger);
        b.keyphrases = replay.get();
        b.pair = std::move(replay);
        return b;
    }
    throw validation_error("unknown oracle kind '" + o.kind + "' (expected gold, llm or replay)");
}

void print_oracle_summary(const OracleBundle& b) {
    if (!b.ledger) return;
    const LedgerTotals t = b.ledger->totals();
    std::cout << "oracle: " << t.entries << " queries, " << t.cache_hits << " cache hits, $"
              << t.usd.str() << "\n";
}

// ---------------------------------------------------------------- shared

EmbeddingMatrix load_aligned_embeddings(const std::string& path, const DocumentSet& docs) {
    KeyedEmbeddings ke = load_embeddings(path);
    if (ke.matrix.n != docs.size())
        throw validation_error(path + ": " + std::to_string(ke.matrix.n) +
                               " embedding rows for " + std::to_string(docs.size()) +
                               " documents");
    for (std::size_t i = 0; i < docs.size(); ++i)
        if (ke.keys[i] != docs[i].id)
            throw validation_error(path + ": row " + std::to_string(i) + " keyed '" +
                                   ke.keys[i] + "' but the dataset has id '" + docs[i].id + "'");
    return std::move(ke.matrix);
}

TaskMode task_mode_from_string(const std::string& s) {
    if (s == "text") return TaskMode::text;
    if (s == "canonicalization") return TaskMode::canonicalization;
    throw validation_error("unknown task '" + s + "' (expected text or canonicalization)");
}

std::filesystem::path seed_path(const std::string& output, std::uint64_t seed, bool multi) {
    if (!multi) return output;
    std::filesystem::path p(output);
    const std::string ext = p.extension().string();
    std::filesystem::path stem = p;
    stem.replace_extension();
    return stem.string() + ".seed" + std::to_string(seed) + ext;
}

struct MetricReport {
    PRF macro;
    PRF micro;
    PRF pair;
    double nmi_value = 0.0;
    double accuracy = 0.0;
};

MetricReport compute_metrics(const Clustering& pred, const GoldLabeling& gold) {
    MetricReport r;
    r.macro = macro_prf(pred, gold);
    r.micro = micro_prf(pred, gold);
    r.pair = pair_prf(pred, gold);
    r.nmi_value = nmi(pred, gold);
    r.accuracy = hungarian_accuracy(pred, gold);
    return r;
}

double metric_by_name(const MetricReport& r, const std::string& name) {
    if (name == "macro_f1") return r.macro.f1;
    if (name == "micro_f1") return r.micro.f1;
    if (name == "pair_f1") return r.pair.f1;
    if (name == "nmi") return r.nmi_value;
    if (name == "accuracy") return r.accuracy;
    throw validation_error("unknown metric '" + name +
                           "' (expected macro_f1, micro_f1, pair_f1, nmi or accuracy)");
}

// Resolves constraint conflicts per --drop-conflicts: direct both-relation
// pairs and closure-level contradictions both lose their cannot-link side.
ConstraintSet finalize_constraints(std::vector<Constraint> list,
                                   const std::vector<std::string>& ids, bool drop_conflicts) {
    ConstraintSet cs;
    for (Constraint& c : list) cs.add(std::move(c));
    std::vector<Constraint> conflicts = check_consistency(cs, ids);
    if (conflicts.empty()) return cs;
    if (!drop_conflicts) {
        std::string msg = "inconsistent constraints:";
        const std::size_t show = std::min<std::size_t>(conflicts.size(), 5);
        for (std::size_t i = 0; i < show; ++i)
            msg += " cannot(" + conflicts[i].a + ", " + conflicts[i].b + ")";
        if (conflicts.size() > show)
            msg += " and " + std::to_string(conflicts.size() - show) + " more";
        msg += "; rerun with --drop-conflicts to keep the must-link side";
        throw validation_error(msg);
    }
    std::set<std::pair<std::string, std::string>> doomed;
    for (const Constraint& c : conflicts) doomed.insert(c.pair());
    ConstraintSet kept;
    for (const Constraint& c : cs.all()) {
        if (c.relation == Relation::cannot_link && doomed.count(c.pair())) continue;
        kept.add(c);
    }
    std::cout << "dropped " << doomed.size() << " conflicting cannot-link pair(s)\n";
    return kept;
}

// Member-mean centroids for a loaded clustering. Empty clusters sit at a
// huge sentinel so they are never nearest and never planned into.
Centroids centroids_from_clustering(const EmbeddingMatrix& X, const DocumentSet& docs,
                                    const Clustering& clustering) {
    Centroids c(clustering.k, X.d);
    std::vector<std::size_t> counts(clustering.k, 0);
    for (const Document& doc : docs.items()) {
        const int j = clustering.at(doc.id);
        if (j < 0 || static_cast<std::size_t>(j) >= clustering.k)
            throw validation_error("cluster index out of range for id '" + doc.id + "'");
        const auto row = X.row(docs.index_of(doc.id));
        for (std::size_t t = 0; t < X.d; ++t) c.row(j)[t] += static_cast<double>(row[t]);
        ++counts[j];
    }
    for (std::size_t j = 0; j < clustering.k; ++j) {
        if (counts[j] == 0) {
            for (std::size_t t = 0; t < X.d; ++t) c.row(j)[t] = 1e300;
            continue;
        }
        for (std::size_t t = 0; t < X.d; ++t) c.row(j)[t] /= static_cast<double>(counts[j]);
    }
    return c;
}

std::string join_phrases(const std::vector<std::string>& phrases, const std::string& fallback) {
    if (phrases.empty()) return fallback;
    std::string joined;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i > 0) joined += ", ";
        joined += phrases[i];
    }
    return joined;
}

// Runs the Explore-Consolidate protocol and returns every judgment made.
// Unspent explore budget (small datasets run out of points) rolls into the
// consolidate phase so the full budget stays usable.
std::vector<PairJudgment> run_explore_consolidate(const EmbeddingMatrix& X,
                                                  const DocumentSet& docs, PairOracle& oracle,
                                                  std::size_t budget, double explore_fraction,
                                                  std::uint64_t seed) {
    if (budget < 1) throw validation_error("selection budget must be >= 1");
    if (explore_fraction < 0.0 || explore_fraction > 1.0)
        throw validation_error("--explore-fraction must lie in [0, 1]");
    std::size_t explore_budget = static_cast<std::size_t>(
        std::llround(static_cast<double>(budget) * explore_fraction));
    explore_budget = std::clamp<std::size_t>(explore_budget, 1, budget);

    SelectionResult er = explore(X, docs, oracle, explore_budget, seed);
    std::vector<PairJudgment> judgments = std::move(er.judgments);
    const std::size_t remaining = budget - judgments.size();
    if (remaining > 0) {
        SelectionResult cr =
            consolidate(X, docs, oracle, std::move(er.neighborhoods), remaining, seed);
        for (PairJudgment& j : cr.judgments) judgments.push_back(std::move(j));
    }
    return judgments;
}

std::vector<Constraint> judgments_to_list(const std::vector<PairJudgment>& judgments,
                                          ConstraintSource source) {
    std::vector<Constraint> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const PairJudgment& j : judgments) {
        if (j.answer == Answer::abstain) continue;
        if (!seen.insert({j.query.a, j.query.b}).second) continue;
        out.emplace_back(j.query.a, j.query.b,
                         j.answer == Answer::must_link ? Relation::must_link
                                                       : Relation::cannot_link,
                         source);
    }
    return out;
}

// ---------------------------------------------------------------- keyphrases

struct KeyphrasesVars {
    std::string dataset, output;
    OracleOptions oracle;
};

void run_keyphrases(const KeyphrasesVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.output, "--output");
    const DocumentSet docs = load_dataset(v.dataset);
    OracleBundle bundle = make_oracle(v.oracle, docs);
    if (bundle.keyphrases == nullptr)
        throw validation_error("oracle kind '" + v.oracle.kind +
                               "' cannot generate keyphrases (use llm or replay)");

    // keyphrase_texts warms the response cache concurrently; the sequential
    // raw-list pass below then hits the cache and costs nothing extra.
    keyphrase_texts(docs, *bundle.keyphrases);
    std::vector<std::vector<std::string>> lists(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        lists[i] = bundle.keyphrases->generate_keyphrases(docs[i]);
    std::ofstream out(v.output, std::ios::trunc);
    if (!out) throw validation_error("cannot write file '" + v.output + "'");
    std::size_t empty_count = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (lists[i].empty()) ++empty_count;
        json j{{"id", docs[i].id},
               {"keyphrases", lists[i]},
               {"text", join_phrases(lists[i], docs[i].text)}};
        out << j.dump() << '\n';
    }
    std::cout << "keyphrases: " << docs.size() << " documents, " << empty_count
              << " empty (fell back to document text)\n";
    print_oracle_summary(bundle);
}

// ---------------------------------------------------------------- expand

struct ExpandVars {
    std::string dataset, embeddings, keyphrases, keyphrase_embeddings, embed_endpoint, mode,
        output;
};

void run_expand(const ExpandVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.embeddings, "--embeddings");
    require_value(v.keyphrases, "--keyphrases");
    require_value(v.output, "--output");
    const DocumentSet docs = load_dataset(v.dataset);
    const EmbeddingMatrix base = load_aligned_embeddings(v.embeddings, docs);

    std::map<std::string, std::string> texts_by_id;
    {
        std::ifstream in(v.keyphrases);
        if (!in) throw validation_error("cannot open file '" + v.keyphrases + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("text"))
                throw validation_error(v.keyphrases + ":" + std::to_string(lineno) +
                                       ": expected {\"id\", \"keyphrases\", \"text\"}");
            texts_by_id[j["id"].get<std::string>()] = j["text"].get<std::string>();
        }
    }
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const Document& doc : docs.items()) {
        auto it = texts_by_id.find(doc.id);
        if (it == texts_by_id.end())
            throw validation_error(v.keyphrases + ": no keyphrase entry for id '" + doc.id +
                                   "'");
        texts.push_back(it->second);
    }

    std::unique_ptr<EmbeddingProvider> provider;
    if (!v.keyphrase_embeddings.empty())
        provider = std::make_unique<FileLookupProvider>(v.keyphrase_embeddings);
    else if (!v.embed_endpoint.empty())
        provider = std::make_unique<HttpEmbeddingProvider>(v.embed_endpoint);
    else
        throw validation_error("either --keyphrase-embeddings or --embed-endpoint is required");

    const EmbeddingMatrix keys = provider->embed(texts);
    const ExpandedMatrix expanded =
        expand_representation(base, keys, concat_mode_from_string(v.mode));
    save_embeddings(v.output, expanded.combined, docs.ids());
    std::cout << "expand: combined dimension " << expanded.combined.d << " = " << base.d << " + "
              << keys.d << ", " << expanded.combined.n << " rows\n";
}

// ---------------------------------------------------------------- select-pairs

struct SelectPairsVars {
    std::string dataset, embeddings, task = "text", output, constraints_output;
    std::uint64_t seed = 0;
    std::size_t budget = 20000;
    double explore_fraction = 0.5;
    OracleOptions oracle;
};

void run_select_pairs(const SelectPairsVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.embeddings, "--embeddings");
    require_value(v.output, "--output");
    const DocumentSet docs = load_dataset(v.dataset);
    const EmbeddingMatrix X = load_aligned_embeddings(v.embeddings, docs);

    if (v.task == "canonicalization") {
        const std::vector<PairQuery> pairs = closest_distinct_pairs(X, docs, v.budget);
        save_pairs(v.output, pairs);
        std::cout << "select-pairs: " << pairs.size() << " closest distinct pairs\n";
        return;
    }
    if (v.task != "text")
        throw validation_error("unknown task '" + v.task +
                               "' (expected text or canonicalization)");

    OracleBundle bundle = make_oracle(v.oracle, docs);
    const std::vector<PairJudgment> judgments = run_explore_consolidate(
        X, docs, *bundle.pair, v.budget, v.explore_fraction, v.seed);
    std::vector<PairQuery> pairs;
    pairs.reserve(judgments.size());
    for (const PairJudgment& j : judgments) pairs.push_back(j.query);
    save_pairs(v.output, pairs);
    if (!v.constraints_output.empty())
        save_constraints(v.constraints_output,
                         judgments_to_list(judgments, source_of_kind(v.oracle.kind)));
    std::cout << "select-pairs: " << pairs.size() << " queries under budget " << v.budget
              << "\n";
    print_oracle_summary(bundle);
}

// ---------------------------------------------------------------- label-pairs

struct LabelPairsVars {
    std::string dataset, pairs, output;
    OracleOptions oracle;
};

void run_label_pairs(const LabelPairsVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.pairs, "--pairs");
    require_value(v.output, "--output");
    const DocumentSet docs = load_dataset(v.dataset);
    const std::vector<PairQuery> queries = load_pairs(v.pairs);
    OracleBundle bundle = make_oracle(v.oracle, docs);
    const std::vector<PairJudgment> judgments = bundle.pair->judge_all(queries);

    std::size_t must = 0, cannot = 0, abstain = 0;
    for (const PairJudgment& j : judgments) {
        if (j.answer == Answer::must_link) ++must;
        else if (j.answer == Answer::cannot_link) ++cannot;
        else ++abstain;
    }
    save_constraints(v.output, judgments_to_list(judgments, source_of_kind(v.oracle.kind)));
    std::cout << "label-pairs: " << judgments.size() << " judged, " << must << " must-link, "
              << cannot << " cannot-link, " << abstain << " abstained\n";
    print_oracle_summary(bundle);
}

// ---------------------------------------------------------------- cluster

struct ClusterVars {
    std::string dataset, embeddings, method = "kmeans", constraints, output, task = "text";
    std::string seeds_text = "0,1,2,3,4", w_grid_text;
    std::size_t k = 0;
    std::size_t budget = 20000;
    double w = 1.0;
    int max_iter = 300;
    double tol = 1e-6;
    bool drop_conflicts = false;
};

void run_cluster(const ClusterVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.embeddings, "--embeddings");
    require_value(v.output, "--output");
    if (v.k == 0) throw validation_error("--k is required and must be >= 1");
    const DocumentSet docs = load_dataset(v.dataset);
    const EmbeddingMatrix X = load_aligned_embeddings(v.embeddings, docs);
    const std::vector<std::string> ids = docs.ids();
    const std::vector<std::uint64_t> seeds = parse_u64_list(v.seeds_text, "--seeds");

    if (v.method != "kmeans" && v.method != "pckmeans")
        throw validation_error("unknown method '" + v.method +
                               "' (expected kmeans or pckmeans)");

    ConstraintSet cs;
    if (v.method == "pckmeans" && !v.constraints.empty()) {
        std::vector<Constraint> list = load_constraint_list(v.constraints);
        if (list.size() > v.budget)  // the budget caps constraint intake
            list.erase(list.begin() + static_cast<std::ptrdiff_t>(v.budget), list.end());
        cs = finalize_constraints(std::move(list), ids, v.drop_conflicts);
    }

    double w = v.w;
    if (v.method == "pckmeans" && !v.w_grid_text.empty()) {
        if (!docs.fully_labeled())
            throw validation_error("--w-grid tuning needs gold labels in the dataset");
        const std::vector<double> grid = parse_double_list(v.w_grid_text, "--w-grid");
        PCKMeansParams params;
        params.k = v.k;
        params.seed = seeds.front();
        params.max_iter = v.max_iter;
        params.tol = v.tol;
        w = tune_w(X, cs, GoldLabeling::from_documents(docs), ids, grid, params,
                   task_mode_from_string(v.task));
        std::cout << "cluster: tuned w = " << w << "\n";
    }

    for (const std::uint64_t seed : seeds) {
        const std::filesystem::path path = seed_path(v.output, seed, seeds.size() > 1);
        if (v.method == "kmeans") {
            const KMeansResult res =
                lloyd(X, kmeanspp_init(X, v.k, seed), ids, v.max_iter, v.tol);
            save_clustering(path, res.clustering, ids);
            std::cout << "cluster: seed " << seed << " inertia " << res.inertia << " after "
                      << res.iterations << " iterations -> " << path.string() << "\n";
        } else {
            PCKMeansParams params;
            params.k = v.k;
            params.w = w;
            params.seed = seed;
            params.max_iter = v.max_iter;
            params.tol = v.tol;
            const PCKMeansResult res = pckmeans(X, cs, ids, params);
            save_clustering(path, res.clustering, ids);
            std::cout << "cluster: seed " << seed << " objective " << res.objective << " ("
                      << res.violations << " violations) after " << res.iterations
                      << " iterations -> " << path.string() << "\n";
        }
    }
}

// ---------------------------------------------------------------- correct

struct CorrectVars {
    std::string dataset, embeddings, clustering, output, log;
    std::size_t k_low = 500;
    std::size_t n_alt = 4;
    std::size_t r = 3;
    OracleOptions oracle;
};

void run_correct(const CorrectVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.embeddings, "--embeddings");
    require_value(v.clustering, "--clustering");
    require_value(v.output, "--output");
    const DocumentSet docs = load_dataset(v.dataset);
    const EmbeddingMatrix X = load_aligned_embeddings(v.embeddings, docs);
    const Clustering input = load_clustering(v.clustering);
    for (const Document& doc : docs.items()) input.at(doc.id);  // must cover the dataset

    OracleBundle bundle = make_oracle(v.oracle, docs);
    const Centroids centroids = centroids_from_clustering(X, docs, input);
    const std::size_t k_low = std::min(v.k_low, docs.size());  // plan at most every point
    const CorrectionPlan correction_plan = plan(X, docs, input, centroids, k_low, v.n_alt);
    const std::vector<std::vector<std::string>> reps = representatives(X, docs, input, v.r);
    const CorrectionResult result = correct(correction_plan, input, *bundle.pair, docs, reps);

    save_clustering(v.output, result.clustering, docs.ids());
    const std::string log_path = v.log.empty() ? v.output + ".log.jsonl" : v.log;
    std::ofstream log(log_path, std::ios::trunc);
    if (!log) throw validation_error("cannot write file '" + log_path + "'");
    std::size_t moved = 0;
    std::size_t queries = 0;
    for (const ReassignmentRecord& rec : result.log) {
        json j{{"id", rec.id},
               {"from", rec.from},
               {"to", rec.to ? json(*rec.to) : json(nullptr)},
               {"queries", rec.queries},
               {"answers", rec.answers}};
        if (rec.transport_failed) j["transport_failed"] = true;
        log << j.dump() << '\n';
        if (rec.to) ++moved;
        queries += static_cast<std::size_t>(rec.queries);
    }
    std::cout << "correct: " << result.log.size() << " candidates, " << moved << " reassigned, "
              << queries << " oracle queries -> " << v.output << "\n";
    print_oracle_summary(bundle);
}

// ---------------------------------------------------------------- evaluate

json prf_json(const PRF& p) {
    json j{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
    if (p.degenerate) j["degenerate"] = true;
    return j;
}

struct EvaluateVars {
    std::string dataset, output;
    std::vector<std::string> preds;
    bool compose = false;
    bool ceiling = false;
};

void run_evaluate(const EvaluateVars& v) {
    require_value(v.dataset, "--dataset");
    if (v.preds.empty() && !v.ceiling)
        throw validation_error("--pred is required (one or more clustering files)");
    const DocumentSet docs = load_dataset(v.dataset);
    if (!docs.fully_labeled())
        throw validation_error("evaluate requires gold labels on every item");
    const GoldLabeling gold = GoldLabeling::from_documents(docs);

    std::vector<std::pair<std::string, Clustering>> runs;
    for (const std::string& path : v.preds) {
        Clustering c = load_clustering(path);
        if (v.compose) c = compose_surface(c, docs);
        runs.emplace_back(path, std::move(c));
    }
    if (v.ceiling)
        runs.emplace_back("optimal_surface_clustering",
                          compose_surface(optimal_surface_clustering(docs), docs));

    json report;
    report["dataset"] = v.dataset;
    report["items"] = docs.size();
    report["runs"] = json::array();
    std::vector<MetricReport> metrics;
    for (const auto& [name, clustering] : runs) {
        const MetricReport r = compute_metrics(clustering, gold);
        metrics.push_back(r);
        report["runs"].push_back(json{{"pred", name},
                                      {"macro", prf_json(r.macro)},
                                      {"micro", prf_json(r.micro)},
                                      {"pair", prf_json(r.pair)},
                                      {"nmi", r.nmi_value},
                                      {"accuracy", r.accuracy}});
    }

    const std::vector<std::string> names = {"macro_f1", "micro_f1", "pair_f1", "nmi",
                                            "accuracy"};
    json mean = json::object();
    json stddev = json::object();
    for (const std::string& name : names) {
        double sum = 0.0;
        for (const MetricReport& r : metrics) sum += metric_by_name(r, name);
        const double mu = sum / static_cast<double>(metrics.size());
        double var = 0.0;
        for (const MetricReport& r : metrics) {
            const double d = metric_by_name(r, name) - mu;
            var += d * d;
        }
        // Sample standard deviation, matching the multi-seed reporting
        // protocol; a single run reports 0.
        const double sd = metrics.size() > 1
                              ? std::sqrt(var / static_cast<double>(metrics.size() - 1))
                              : 0.0;
        mean[name] = mu;
        stddev[name] = sd;
    }
    report["mean"] = mean;
    report["stddev"] = stddev;

    const std::string text = report.dump(2) + "\n";
    if (v.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(v.output, std::ios::trunc);
        if (!out) throw validation_error("cannot write file '" + v.output + "'");
        out << text;
        std::cout << "evaluate: " << runs.size() << " run(s) -> " << v.output << "\n";
    }
}

// ---------------------------------------------------------------- cost-report

struct CostReportVars {
    std::string cache, output;
    std::string price_in = "0", price_out = "0";
};

void run_cost_report(const CostReportVars& v) {
    require_value(v.cache, "--cache");
    const ResponseCache cache(v.cache);
    CostLedger ledger(Usd::parse(v.price_in), Usd::parse(v.price_out));
    for (const CacheRecord& rec : cache.records())
        ledger.record(rec.hash, rec.tokens_in, rec.tokens_out, false);
    const LedgerTotals t = ledger.totals();
    json report{{"cache", v.cache},
                {"records", t.entries},
                {"tokens_in", t.tokens_in},
                {"tokens_out", t.tokens_out},
                {"usd", t.usd.str()}};
    const std::string text = report.dump(2) + "\n";
    if (v.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(v.output, std::ios::trunc);
        if (!out) throw validation_error("cannot write file '" + v.output + "'");
        out << text;
        std::cout << "cost-report: $" << t.usd.str() << " across " << t.entries
                  << " cached queries -> " << v.output << "\n";
    }
}

// ---------------------------------------------------------------- curve

struct CurveVars {
    std::string dataset, embeddings, output, task = "text", metric = "macro_f1";
    std::string budgets_text = "0,50,100,200", seeds_text = "0,1,2,3,4";
    std::size_t k = 0;
    double w = 1.0;
    double explore_fraction = 0.5;
    int max_iter = 300;
    double tol = 1e-6;
    OracleOptions oracle;
};

void run_curve(const CurveVars& v) {
    require_value(v.dataset, "--dataset");
    require_value(v.embeddings, "--embeddings");
    require_value(v.output, "--output");
    if (v.k == 0) throw validation_error("--k is required and must be >= 1");
    const DocumentSet docs = load_dataset(v.dataset);
    if (!docs.fully_labeled())
        throw validation_error("curve requires gold labels to score each run");
    const EmbeddingMatrix X = load_aligned_embeddings(v.embeddings, docs);
    const std::vector<std::string> ids = docs.ids();
    const GoldLabeling gold = GoldLabeling::from_documents(docs);
    const std::vector<std::uint64_t> budgets = parse_u64_list(v.budgets_text, "--budgets");
    const std::vector<std::uint64_t> seeds = parse_u64_list(v.seeds_text, "--seeds");
    (void)metric_by_name(MetricReport{}, v.metric);  // validate the name up front

    OracleBundle bundle = make_oracle(v.oracle, docs);
    std::ofstream out(v.output, std::ios::trunc);
    if (!out) throw validation_error("cannot write file '" + v.output + "'");

    for (const std::uint64_t budget : budgets) {
        double sum = 0.0;
        for (const std::uint64_t seed : seeds) {
            ConstraintSet cs;
            if (budget > 0) {
                std::vector<PairJudgment> judgments;
                if (v.task == "canonicalization") {
                    const std::vector<PairQuery> pairs =
                        closest_distinct_pairs(X, docs, budget);
                    judgments = bundle.pair->judge_all(pairs);
                } else {
                    judgments = run_explore_consolidate(X, docs, *bundle.pair, budget,
                                                        v.explore_fraction, seed);
                }
                // The sweep has no interactive recourse, so contradictory
                // oracle answers are always resolved by dropping here.
                cs = finalize_constraints(
                    judgments_to_list(judgments, source_of_kind(v.oracle.kind)), ids, true);
            }
            PCKMeansParams params;
            params.k = v.k;
            params.w = v.w;
            params.seed = seed;
            params.max_iter = v.max_iter;
            params.tol = v.tol;
            const PCKMeansResult res = pckmeans(X, cs, ids, params);
            const double value = metric_by_name(compute_metrics(res.clustering, gold), v.metric);
            sum += value;
            out << budget << '\t' << v.metric << '\t' << seed << '\t' << value << '\n';
        }
        std::cout << "curve: budget " << budget << " mean " << v.metric << " "
                  << sum / static_cast<double>(seeds.size()) << "\n";
    }
    print_oracle_summary(bundle);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        const json cfg = load_config_from_argv(argc, argv);

        CLI::App app{"few-shot semi-supervised clustering toolkit"};
        app.require_subcommand(1);
        std::string config_path;  // consumed by the pre-scan; bound so CLI11 accepts it
        app.add_option("--config", config_path, "JSON config file; flags override its fields");

        auto add_config_flag = [&](CLI::App* sub) {
            sub->add_option("--config", config_path,
                            "JSON config file; flags override its fields");
        };

        // keyphrases
        auto kv = std::make_shared<KeyphrasesVars>();
        {
            CLI::App* sub =
                app.add_subcommand("keyphrases", "generate per-document keyphrases via the oracle");
            add_config_flag(sub);
            kv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            kv->output = cfg_get<std::string>(cfg, "output", "");
            sub->add_option("--dataset", kv->dataset, "dataset JSONL");
            sub->add_option("--output", kv->output, "keyphrase JSONL to write");
            add_oracle_options(sub, kv->oracle, cfg);
            sub->callback([kv] { run_keyphrases(*kv); });
        }

        // expand
        auto ev = std::make_shared<ExpandVars>();
        {
            CLI::App* sub = app.add_subcommand(
                "expand", "embed keyphrases and concatenate with base embeddings");
            add_config_flag(sub);
            ev->dataset = cfg_get<std::string>(cfg, "dataset", "");
            ev->embeddings = cfg_get<std::string>(cfg, "embeddings", "");
            ev->keyphrases = cfg_get<std::string>(cfg, "keyphrases", "");
            ev->keyphrase_embeddings = cfg_get<std::string>(cfg, "keyphrase_embeddings", "");
            ev->embed_endpoint = cfg_get<std::string>(cfg, "embed_endpoint", "");
            ev->mode = cfg_get<std::string>(cfg, "mode", "l2_each_part");
            ev->output = cfg_get<std::string>(cfg, "output", "");
            sub->add_option("--dataset", ev->dataset, "dataset JSONL");
            sub->add_option("--embeddings", ev->embeddings, "base embedding file (FSCEMB1)");
            sub->add_option("--keyphrases", ev->keyphrases, "keyphrase JSONL from `keyphrases`");
            sub->add_option("--keyphrase-embeddings", ev->keyphrase_embeddings,
                            "precomputed keyphrase-text embedding file (FSCEMB1)");
            sub->add_option("--embed-endpoint", ev->embed_endpoint,
                            "HTTP embedding service URL");
            sub->add_option("--mode", ev->mode, "concatenation: l2_each_part | raw_concat");
            sub->add_option("--output", ev->output, "combined embedding file to write");
            sub->callback([ev] { run_expand(*ev); });
        }

        // select-pairs
        auto sv = std::make_shared<SelectPairsVars>();
        {
            CLI::App* sub = app.add_subcommand(
                "select-pairs", "choose oracle queries (Explore-Consolidate or closest pairs)");
            add_config_flag(sub);
            sv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            sv->embeddings = cfg_get<std::string>(cfg, "embeddings", "");
            sv->task = cfg_get<std::string>(cfg, "task", sv->task);
            sv->budget = cfg_get<std::size_t>(cfg, "budget", sv->budget);
            sv->seed = cfg_get<std::uint64_t>(cfg, "seed", sv->seed);
            sv->explore_fraction =
                cfg_get<double>(cfg, "explore_fraction", sv->explore_fraction);
            sv->output = cfg_get<std::string>(cfg, "output", "");
            sv->constraints_output = cfg_get<std::string>(cfg, "constraints_output", "");
            sub->add_option("--dataset", sv->dataset, "dataset JSONL");
            sub->add_option("--embeddings", sv->embeddings, "embedding file (FSCEMB1)");
            sub->add_option("--task", sv->task, "text | canonicalization");
            sub->add_option("--budget", sv->budget, "total query budget (default 20000)");
            sub->add_option("--seed", sv->seed, "selection seed");
            sub->add_option("--explore-fraction", sv->explore_fraction,
                            "share of the budget spent on Explore (default 0.5)");
            sub->add_option("--output", sv->output, "pair JSONL to write");
            sub->add_option("--constraints-output", sv->constraints_output,
                            "also write labeled constraints here (text task)");
            add_oracle_options(sub, sv->oracle, cfg);
            sub->callback([sv] { run_select_pairs(*sv); });
        }

        // label-pairs
        auto lv = std::make_shared<LabelPairsVars>();
        {
            CLI::App* sub =
                app.add_subcommand("label-pairs", "judge a pair file with the oracle");
            add_config_flag(sub);
            lv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            lv->pairs = cfg_get<std::string>(cfg, "pairs", "");
            lv->output = cfg_get<std::string>(cfg, "output", "");
            sub->add_option("--dataset", lv->dataset, "dataset JSONL");
            sub->add_option("--pairs", lv->pairs, "pair JSONL from select-pairs");
            sub->add_option("--output", lv->output, "constraint JSONL to write");
            add_oracle_options(sub, lv->oracle, cfg);
            sub->callback([lv] { run_label_pairs(*lv); });
        }

        // cluster
        auto cv = std::make_shared<ClusterVars>();
        {
            CLI::App* sub = app.add_subcommand("cluster", "run kmeans or pckmeans per seed");
            add_config_flag(sub);
            cv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            cv->embeddings = cfg_get<std::string>(cfg, "embeddings", "");
            cv->method = cfg_get<std::string>(cfg, "method", cv->method);
            cv->constraints = cfg_get<std::string>(cfg, "constraints", "");
            cv->task = cfg_get<std::string>(cfg, "task", cv->task);
            cv->k = cfg_get<std::size_t>(cfg, "k", cv->k);
            cv->seeds_text = cfg_get<std::string>(cfg, "seeds", cv->seeds_text);
            cv->budget = cfg_get<std::size_t>(cfg, "budget", cv->budget);
            cv->w = cfg_get<double>(cfg, "w", cv->w);
            cv->w_grid_text = cfg_get<std::string>(cfg, "w_grid", cv->w_grid_text);
            cv->max_iter = cfg_get<int>(cfg, "max_iter", cv->max_iter);
            cv->tol = cfg_get<double>(cfg, "tol", cv->tol);
            cv->output = cfg_get<std::string>(cfg, "output", "");
            sub->add_option("--dataset", cv->dataset, "dataset JSONL");
            sub->add_option("--embeddings", cv->embeddings, "embedding file (FSCEMB1)");
            sub->add_option("--method", cv->method, "kmeans | pckmeans");
            sub->add_option("--constraints", cv->constraints, "constraint JSONL (pckmeans)");
            sub->add_option("--task", cv->task,
                            "text | canonicalization (selects the w tuning metric)");
            sub->add_option("--k", cv->k, "cluster count");
            sub->add_option("--seeds", cv->seeds_text, "comma list (default 0,1,2,3,4)");
            sub->add_option("--budget", cv->budget,
                            "cap on constraints read from the file (default 20000)");
            sub->add_option("--w", cv->w, "pckmeans violation penalty (default 1)");
            sub->add_option("--w-grid", cv->w_grid_text,
                            "comma list; tunes w against gold labels when given");
            sub->add_option("--max-iter", cv->max_iter, "iteration cap (default 300)");
            sub->add_option("--tol", cv->tol, "relative improvement tolerance (default 1e-6)");
            sub->add_flag("--drop-conflicts", cv->drop_conflicts,
                          "drop cannot-links that contradict must-link closures");
            sub->add_option("--output", cv->output,
                            "clustering JSONL; multi-seed runs get .seedN suffixes");
            sub->callback([cv] { run_cluster(*cv); });
        }

        // correct
        auto rv = std::make_shared<CorrectVars>();
        {
            CLI::App* sub = app.add_subcommand(
                "correct", "rerank low-confidence points through the oracle");
            add_config_flag(sub);
            rv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            rv->embeddings = cfg_get<std::string>(cfg, "embeddings", "");
            rv->clustering = cfg_get<std::string>(cfg, "clustering", "");
            rv->k_low = cfg_get<std::size_t>(cfg, "k_low", rv->k_low);
            rv->n_alt = cfg_get<std::size_t>(cfg, "n_alt", rv->n_alt);
            rv->r = cfg_get<std::size_t>(cfg, "r", rv->r);
            rv->output = cfg_get<std::string>(cfg, "output", "");
            rv->log = cfg_get<std::string>(cfg, "log", "");
            sub->add_option("--dataset", rv->dataset, "dataset JSONL");
            sub->add_option("--embeddings", rv->embeddings, "embedding file (FSCEMB1)");
            sub->add_option("--clustering", rv->clustering, "input clustering JSONL");
            sub->add_option("--k-low", rv->k_low,
                            "low-margin candidates to consider (default 500, clamped to n)");
            sub->add_option("--n-alt", rv->n_alt, "alternative clusters per point (default 4)");
            sub->add_option("--r", rv->r, "representatives per cluster (default 3)");
            sub->add_option("--output", rv->output, "corrected clustering JSONL");
            sub->add_option("--log", rv->log,
                            "reassignment log JSONL (default <output>.log.jsonl)");
            add_oracle_options(sub, rv->oracle, cfg);
            sub->callback([rv] { run_correct(*rv); });
        }

        // evaluate
        auto xv = std::make_shared<EvaluateVars>();
        {
            CLI::App* sub =
                app.add_subcommand("evaluate", "score clusterings against gold labels");
            add_config_flag(sub);
            xv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            xv->output = cfg_get<std::string>(cfg, "output", "");
            if (cfg.contains("pred")) xv->preds = cfg.at("pred").get<std::vector<std::string>>();
            sub->add_option("--dataset", xv->dataset, "dataset JSONL with gold labels");
            sub->add_option("--pred", xv->preds,
                            "clustering JSONL file(s); repeat for per-seed runs");
            sub->add_flag("--compose-surface", xv->compose,
                          "treat predictions as surface-form clusterings and compose onto "
                          "mentions first");
            sub->add_flag("--ceiling", xv->ceiling,
                          "also score the optimal surface-form clustering ceiling");
            sub->add_option("--output", xv->output, "report JSON (stdout when omitted)");
            sub->callback([xv] { run_evaluate(*xv); });
        }

        // cost-report
        auto ov = std::make_shared<CostReportVars>();
        {
            CLI::App* sub =
                app.add_subcommand("cost-report", "exact spend totals from a response cache");
            add_config_flag(sub);
            ov->cache = cfg_get<std::string>(cfg, "cache", "");
            ov->price_in = cfg_price(cfg, "price_in", ov->price_in);
            ov->price_out = cfg_price(cfg, "price_out", ov->price_out);
            ov->output = cfg_get<std::string>(cfg, "output", "");
            sub->add_option("--cache", ov->cache, "oracle response cache file");
            sub->add_option("--price-in", ov->price_in, "USD per 1K prompt tokens");
            sub->add_option("--price-out", ov->price_out, "USD per 1K completion tokens");
            sub->add_option("--output", ov->output, "report JSON (stdout when omitted)");
            sub->callback([ov] { run_cost_report(*ov); });
        }

        // curve
        auto uv = std::make_shared<CurveVars>();
        {
            CLI::App* sub = app.add_subcommand(
                "curve", "metric vs constraint budget sweep (tab-separated rows)");
            add_config_flag(sub);
            uv->dataset = cfg_get<std::string>(cfg, "dataset", "");
            uv->embeddings = cfg_get<std::string>(cfg, "embeddings", "");
            uv->task = cfg_get<std::string>(cfg, "task", uv->task);
            uv->metric = cfg_get<std::string>(cfg, "metric", uv->metric);
            uv->budgets_text = cfg_get<std::string>(cfg, "budgets", uv->budgets_text);
            uv->seeds_text = cfg_get<std::string>(cfg, "seeds", uv->seeds_text);
            uv->k = cfg_get<std::size_t>(cfg, "k", uv->k);
            uv->w = cfg_get<double>(cfg, "w", uv->w);
            uv->explore_fraction =
                cfg_get<double>(cfg, "explore_fraction", uv->explore_fraction);
            uv->max_iter = cfg_get<int>(cfg, "max_iter", uv->max_iter);
            uv->tol = cfg_get<double>(cfg, "tol", uv->tol);
            uv->output = cfg_get<std::string>(cfg, "output", "");
            sub->add_option("--dataset", uv->dataset, "dataset JSONL with gold labels");
            sub->add_option("--embeddings", uv->embeddings, "embedding file (FSCEMB1)");
            sub->add_option("--task", uv->task, "text | canonicalization");
            sub->add_option("--metric", uv->metric,
                            "macro_f1 | micro_f1 | pair_f1 | nmi | accuracy");
            sub->add_option("--budgets", uv->budgets_text,
                            "comma list of constraint budgets (default 0,50,100,200)");
            sub->add_option("--seeds", uv->seeds_text, "comma list (default 0,1,2,3,4)");
            sub->add_option("--k", uv->k, "cluster count");
            sub->add_option("--w", uv->w, "pckmeans violation penalty (default 1)");
            sub->add_option("--explore-fraction", uv->explore_fraction,
                            "share of each budget spent on Explore (default 0.5)");
            sub->add_option("--max-iter", uv->max_iter, "iteration cap (default 300)");
            sub->add_option("--tol", uv->tol, "relative improvement tolerance");
            sub->add_option("--output", uv->output,
                            "TSV to write: budget, metric, seed, value");
            add_oracle_options(sub, uv->oracle, cfg);
            sub->callback([uv] { run_curve(*uv); });
        }

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 1;
        }
        return 0;
    } catch (const transport_error& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
