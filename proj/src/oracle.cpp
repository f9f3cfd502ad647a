#include "fsc/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>
#include <tuple>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace fsc {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

void OracleConfig::validate() const {
    if (model.empty()) throw config_error("oracle config: model must be set");
    if (price_in.negative() || price_out.negative())
        throw config_error("oracle config: prices must be non-negative");
    if (max_retries < 0) throw config_error("oracle config: max_retries must be >= 0");
    if (max_concurrent < 1) throw config_error("oracle config: max_concurrent must be >= 1");
}

const char* to_string(Answer answer) {
    switch (answer) {
        case Answer::must_link: return "must_link";
        case Answer::cannot_link: return "cannot_link";
        case Answer::abstain: return "abstain";
    }
    return "unknown";
}

Answer parse_answer(const std::string& response) {
    std::size_t begin = 0;
    while (begin < response.size() &&
           !std::isalnum(static_cast<unsigned char>(response[begin])))
        ++begin;
    std::size_t end = begin;
    while (end < response.size() && std::isalnum(static_cast<unsigned char>(response[end])))
        ++end;
    const std::string token = lower(response.substr(begin, end - begin));
    if (token == "yes") return Answer::must_link;
    if (token == "no") return Answer::cannot_link;
    return Answer::abstain;
}

std::vector<std::string> parse_keyphrase_list(const std::string& response) {
    auto coerce = [](const json& j) -> std::optional<std::vector<std::string>> {
        if (!j.is_array()) return std::nullopt;
        std::vector<std::string> out;
        for (const json& item : j) {
            if (!item.is_string()) return std::nullopt;
            out.push_back(item.get<std::string>());
        }
        return out;
    };

    try {
        if (auto list = coerce(json::parse(response))) return *list;
    } catch (const json::parse_error&) {
    }

    // Repair: take the first bracket-delimited substring, drop trailing
    // commas before the closing bracket, try again.
    const std::size_t open = response.find('[');
    const std::size_t close = response.find(']', open == std::string::npos ? 0 : open);
    if (open == std::string::npos || close == std::string::npos) return {};
    std::string snippet = response.substr(open, close - open + 1);
    std::size_t tail = snippet.size() - 1;  // at ']'
    while (tail > 0) {
        const std::size_t prev = tail - 1;
        const char c = snippet[prev];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            snippet.erase(prev, 1);
            --tail;
        } else {
            break;
        }
    }
    try {
        if (auto list = coerce(json::parse(snippet))) return *list;
    } catch (const json::parse_error&) {
    }
    return {};
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &digest_len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out(digest_len * 2, '0');
    for (unsigned int i = 0; i < digest_len; ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0xf];
    }
    return out;
}

std::string query_hash(const std::string& model, double temperature, const std::string& prompt) {
    // json round-trip formatting gives one canonical spelling per value.
    return sha256_hex(model + "\n" + json(temperature).dump() + "\n" + prompt);
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // fresh cache file, created on first put
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            std::cerr << "warning: skipping malformed cache line " << lineno << " in " << path_
                      << "\n";
            continue;
        }
        CacheRecord rec;
        rec.hash = j.value("hash", "");
        rec.model = j.value("model", "");
        rec.prompt = j.value("prompt", "");
        rec.response = j.value("response", "");
        rec.tokens_in = j.value("tokens_in", std::int64_t{0});
        rec.tokens_out = j.value("tokens_out", std::int64_t{0});
        rec.ts_ms = j.value("ts_ms", std::int64_t{0});
        if (rec.hash.empty()) {
            std::cerr << "warning: skipping cache line " << lineno << " without hash in "
                      << path_ << "\n";
            continue;
        }
        records_.emplace(rec.hash, std::move(rec));  // keep-first
    }
}

bool ResponseCache::contains(const std::string& hash) const {
    std::lock_guard<std::mutex> lock(mu_);
    return records_.count(hash) > 0;
}

std::optional<CacheRecord> ResponseCache::get(const std::string& hash) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = records_.find(hash);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::put(const CacheRecord& record) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!records_.emplace(record.hash, record).second) return;  // keep-first
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw validation_error("cannot append to cache file: " + path_);
    json j{{"hash", record.hash},           {"model", record.model},
           {"prompt", record.prompt},       {"response", record.response},
           {"tokens_in", record.tokens_in}, {"tokens_out", record.tokens_out},
           {"ts_ms", record.ts_ms}};
    out << j.dump() << "\n";
}

std::size_t ResponseCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return records_.size();
}

std::vector<CacheRecord> ResponseCache::records() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<CacheRecord> out;
    out.reserve(records_.size());
    for (const auto& [hash, rec] : records_) out.push_back(rec);
    std::sort(out.begin(), out.end(), [](const CacheRecord& a, const CacheRecord& b) {
        return std::tie(a.ts_ms, a.hash) < std::tie(b.ts_ms, b.hash);
    });
    return out;
}

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw config_error("oracle endpoint must include a scheme: " + endpoint);
    const std::size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

bool retryable_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

TransportResult HttpTransport::complete(const OracleConfig& cfg, const std::string& prompt,
                                        const std::string& hash) {
    if (cfg.endpoint.empty())
        throw config_error("oracle endpoint not configured but a live query was issued");
    const SplitUrl url = split_url(cfg.endpoint);

    json body{{"model", cfg.model},
              {"temperature", cfg.temperature},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key != nullptr && *key != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::mt19937_64 jitter_rng(std::random_device{}());
    std::uniform_real_distribution<double> jitter(0.5, 1.5);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            const double scale = jitter(jitter_rng) * static_cast<double>(1LL << (attempt - 1));
            const auto delay = std::chrono::duration_cast<std::chrono::milliseconds>(
                cfg.backoff_base * scale);
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(url.base);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200);
            if (retryable_status(res->status)) continue;
            throw transport_error("oracle request failed (" + last_error + ")", hash);
        }
        try {
            const json reply = json::parse(res->body);
            TransportResult out;
            out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
            if (reply.contains("usage")) {
                out.tokens_in = reply["usage"].value("prompt_tokens", std::int64_t{0});
                out.tokens_out = reply["usage"].value("completion_tokens", std::int64_t{0});
            }
            return out;
        } catch (const json::exception& e) {
            last_error = std::string("malformed completion body: ") + e.what();
            continue;
        }
    }
    throw transport_error("oracle request failed after " + std::to_string(cfg.max_retries + 1) +
                              " attempts (" + last_error + ")",
                          hash);
}

std::vector<PairJudgment> PairOracle::judge_all(const std::vector<PairQuery>& qs) {
    std::vector<PairJudgment> out;
    out.reserve(qs.size());
    for (const PairQuery& q : qs) out.push_back(judge(q));
    return out;
}

MembershipJudgment PairOracle::judge_membership(const std::string& id,
                                                const std::vector<std::string>& representative_ids) {
    if (representative_ids.empty())
        throw parameter_error("membership query needs at least one representative");
    // Derived form: the point belongs if it must-links with any representative.
    MembershipJudgment out;
    out.id = id;
    bool any_abstain = false;
    for (const std::string& rep : representative_ids) {
        if (rep == id) {  // a point trivially links with itself
            out.answer = Answer::must_link;
            out.raw_response = "yes";
            return out;
        }
        const PairJudgment j = judge(PairQuery(id, rep, QueryPhase::consolidate));
        out.raw_response = j.raw_response;
        out.cached = out.cached || j.cached;
        if (j.answer == Answer::must_link) {
            out.answer = Answer::must_link;
            return out;
        }
        if (j.answer == Answer::abstain) any_abstain = true;
    }
    out.answer = any_abstain ? Answer::abstain : Answer::cannot_link;
    return out;
}

LlmOracle::LlmOracle(OracleConfig cfg, PromptTemplate tmpl, const DocumentSet& docs,
                     Transport& transport, ResponseCache& cache, CostLedger& ledger)
    : cfg_(std::move(cfg)),
      tmpl_(std::move(tmpl)),
      docs_(docs),
      transport_(transport),
      cache_(cache),
      ledger_(ledger) {
    cfg_.validate();
}

LlmOracle::Exchange LlmOracle::run(const std::string& prompt) {
    const std::string hash = query_hash(cfg_.model, cfg_.temperature, prompt);
    if (auto hit = cache_.get(hash)) {
        ledger_.record(hash, hit->tokens_in, hit->tokens_out, true);
        return {hit->response, hit->tokens_in, hit->tokens_out, true};
    }
    const TransportResult res = transport_.complete(cfg_, prompt, hash);
    CacheRecord rec;
    rec.hash = hash;
    rec.model = cfg_.model;
    rec.prompt = prompt;
    rec.response = res.text;
    rec.tokens_in = res.tokens_in;
    rec.tokens_out = res.tokens_out;
    rec.ts_ms = now_ms();
    cache_.put(rec);
    ledger_.record(hash, res.tokens_in, res.tokens_out, false);
    return {res.text, res.tokens_in, res.tokens_out, false};
}

PairJudgment LlmOracle::judge(const PairQuery& q) {
    const Document& a = docs_.by_id(q.a);
    const Document& b = docs_.by_id(q.b);
    const Exchange ex = run(tmpl_.render_pair(a, b));
    return {q, parse_answer(ex.response), ex.response, ex.cached};
}

std::vector<PairJudgment> LlmOracle::judge_all(const std::vector<PairQuery>& qs) {
    if (qs.empty()) return {};
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(cfg_.max_concurrent), qs.size());
    if (workers <= 1) return PairOracle::judge_all(qs);

    std::vector<std::optional<PairJudgment>> buffer(qs.size());
    std::vector<std::exception_ptr> errors(qs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= qs.size()) return;
            try {
                buffer[i] = judge(qs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();

    // Results released in submission order; the first failure (in that
    // order) wins so reruns are reproducible.
    std::vector<PairJudgment> out;
    out.reserve(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*buffer[i]));
    }
    return out;
}

MembershipJudgment LlmOracle::judge_membership(const std::string& id,
                                               const std::vector<std::string>& representative_ids) {
    const Document& x = docs_.by_id(id);
    std::vector<const Document*> reps;
    for (const std::string& rep_id : representative_ids) {
        if (rep_id == id) return {id, Answer::must_link, "yes", false};
        reps.push_back(&docs_.by_id(rep_id));
    }
    if (reps.empty()) throw parameter_error("membership query needs at least one representative");
    const Exchange ex = run(tmpl_.render_membership(x, reps));
    return {id, parse_answer(ex.response), ex.response, ex.cached};
}

std::vector<std::string> LlmOracle::generate_keyphrases(const Document& doc) {
    const Exchange ex = run(tmpl_.render_keyphrase(doc));
    std::vector<std::string> phrases = parse_keyphrase_list(ex.response);
    if (phrases.empty() && !ex.response.empty())
        std::cerr << "warning: unparseable keyphrase response for document '" << doc.id << "'\n";
    return phrases;
}

PairJudgment GoldOracle::judge(const PairQuery& q) { return gold_judge(gold_, q); }

MembershipJudgment GoldOracle::judge_membership(const std::string& id,
                                                const std::vector<std::string>& representative_ids) {
    if (representative_ids.empty())
        throw parameter_error("membership query needs at least one representative");
    const std::string& label = gold_.at(id);
    for (const std::string& rep : representative_ids) {
        if (rep == id || gold_.at(rep) == label) return {id, Answer::must_link, "yes", false};
    }
    return {id, Answer::cannot_link, "no", false};
}

ReplayOracle::ReplayOracle(OracleConfig cfg, PromptTemplate tmpl, const DocumentSet& docs,
                           const ResponseCache& cache, CostLedger& ledger)
    : cfg_(std::move(cfg)),
      tmpl_(std::move(tmpl)),
      docs_(docs),
      cache_(cache),
      ledger_(ledger) {
    cfg_.validate();
}

CacheRecord ReplayOracle::lookup(const std::string& prompt) {
    const std::string hash = query_hash(cfg_.model, cfg_.temperature, prompt);
    auto hit = cache_.get(hash);
    if (!hit)
        throw transport_error("replay cache miss for query " + hash, hash);
    ledger_.record(hash, hit->tokens_in, hit->tokens_out, true);
    return *hit;
}

PairJudgment ReplayOracle::judge(const PairQuery& q) {
    const Document& a = docs_.by_id(q.a);
    const Document& b = docs_.by_id(q.b);
    const CacheRecord rec = lookup(tmpl_.render_pair(a, b));
    return {q, parse_answer(rec.response), rec.response, true};
}

MembershipJudgment ReplayOracle::judge_membership(const std::string& id,
                                                  const std::vector<std::string>& representative_ids) {
    const Document& x = docs_.by_id(id);
    std::vector<const Document*> reps;
    for (const std::string& rep_id : representative_ids) {
        if (rep_id == id) return {id, Answer::must_link, "yes", true};
        reps.push_back(&docs_.by_id(rep_id));
    }
    if (reps.empty()) throw parameter_error("membership query needs at least one representative");
    const CacheRecord rec = lookup(tmpl_.render_membership(x, reps));
    return {id, parse_answer(rec.response), rec.response, true};
}

std::vector<std::string> ReplayOracle::generate_keyphrases(const Document& doc) {
    const CacheRecord rec = lookup(tmpl_.render_keyphrase(doc));
    std::vector<std::string> phrases = parse_keyphrase_list(rec.response);
    if (phrases.empty() && !rec.response.empty())
        std::cerr << "warning: unparseable keyphrase response for document '" << doc.id << "'\n";
    return phrases;
}

PairJudgment gold_judge(const GoldLabeling& gold, const PairQuery& q) {
    const bool same = gold.at(q.a) == gold.at(q.b);
    PairJudgment out{q, same ? Answer::must_link : Answer::cannot_link, same ? "yes" : "no",
                     false};
    return out;
}

PairJudgment replay_judge(const ResponseCache& cache, const OracleConfig& cfg,
                          const PromptTemplate& tmpl, const DocumentSet& docs,
                          const PairQuery& q) {
    const Document& a = docs.by_id(q.a);
    const Document& b = docs.by_id(q.b);
    const std::string prompt = tmpl.render_pair(a, b);
    const std::string hash = query_hash(cfg.model, cfg.temperature, prompt);
    auto hit = cache.get(hash);
    if (!hit) throw transport_error("replay cache miss for query " + hash, hash);
    return {q, parse_answer(hit->response), hit->response, true};
}

}  // namespace fsc
