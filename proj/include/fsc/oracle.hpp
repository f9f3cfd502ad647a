#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsc/cost.hpp"
#include "fsc/pair_query.hpp"
#include "fsc/prompts.hpp"
#include "fsc/types.hpp"

namespace fsc {

struct OracleConfig {
    std::string endpoint;  // chat-completions URL, e.g. http://host:port/v1/chat/completions
    std::string model;
    double temperature = 0.0;
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{250};
    Usd price_in;   // USD per 1K prompt tokens
    Usd price_out;  // USD per 1K completion tokens
    int max_concurrent = 4;
    std::string api_key_env = "FSC_API_KEY";  // credential env var, value never logged

    void validate() const;
};

enum class Answer { must_link, cannot_link, abstain };

const char* to_string(Answer answer);

struct PairJudgment {
    PairQuery query;
    Answer answer = Answer::abstain;
    std::string raw_response;
    bool cached = false;
};

// Result of a cluster-membership question (post-correction): does `id`
// belong with the representative items it was shown?
struct MembershipJudgment {
    std::string id;
    Answer answer = Answer::abstain;
    std::string raw_response;
    bool cached = false;
};

// Leading-token parse: "yes" -> must_link, "no" -> cannot_link (both
// case-insensitive, surrounding punctuation ignored), anything else abstains.
Answer parse_answer(const std::string& response);

// Parses a JSON string array out of a model response. Falls back to the
// first bracket-delimited substring with trailing commas stripped; returns
// an empty list if no list can be recovered (caller logs).
std::vector<std::string> parse_keyphrase_list(const std::string& response);

// Hex SHA-256 of the canonical query description (model, temperature,
// rendered prompt). The pair is already in canonical order inside the
// prompt, so (a,b) and (b,a) hash identically.
std::string sha256_hex(const std::string& data);
std::string query_hash(const std::string& model, double temperature, const std::string& prompt);

struct CacheRecord {
    std::string hash;
    std::string model;
    std::string prompt;
    std::string response;
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    std::int64_t ts_ms = 0;
};

// Append-only response cache, line-delimited JSON on disk. The first record
// for a hash wins; later duplicates are ignored so replays stay stable.
class ResponseCache {
public:
    ResponseCache() = default;                // in-memory only
    explicit ResponseCache(std::string path); // loads existing records, appends on put

    bool contains(const std::string& hash) const;
    std::optional<CacheRecord> get(const std::string& hash) const;
    void put(const CacheRecord& record);
    std::size_t size() const;

    // Every record, ordered by (ts_ms, hash) so reports are deterministic.
    std::vector<CacheRecord> records() const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, CacheRecord> records_;
    std::string path_;
};

struct TransportResult {
    std::string text;  // assistant message content
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
};

// One chat completion round-trip. Implementations own retry policy; a throw
// of transport_error means the request is given up on.
class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportResult complete(const OracleConfig& cfg, const std::string& prompt,
                                     const std::string& hash) = 0;
};

// HTTPS/HTTP chat-completions client with exponential backoff and jitter.
class HttpTransport : public Transport {
public:
    TransportResult complete(const OracleConfig& cfg, const std::string& prompt,
                             const std::string& hash) override;
};

// Pairwise pseudo-oracle interface. judge_all preserves submission order in
// its results regardless of internal concurrency.
class PairOracle {
public:
    virtual ~PairOracle() = default;
    virtual PairJudgment judge(const PairQuery& q) = 0;
    virtual std::vector<PairJudgment> judge_all(const std::vector<PairQuery>& qs);
    // Membership form used by post-correction: is `id` correctly clustered
    // with these representative items? Default derives the answer from pair
    // judgments against each representative (any must_link -> must_link).
    virtual MembershipJudgment judge_membership(const std::string& id,
                                          const std::vector<std::string>& representative_ids);
};

// Keyphrase side of the pseudo-oracle, implemented by the LLM and replay
// oracles and by test mocks. max_concurrent bounds caller-side parallelism.
class KeyphraseGenerator {
public:
    virtual ~KeyphraseGenerator() = default;
    virtual std::vector<std::string> generate_keyphrases(const Document& doc) = 0;
    virtual int max_concurrent() const { return 1; }
};

// LLM-backed oracle: renders prompts, consults the cache, pays the ledger.
class LlmOracle : public PairOracle, public KeyphraseGenerator {
public:
    LlmOracle(OracleConfig cfg, PromptTemplate tmpl, const DocumentSet& docs,
              Transport& transport, ResponseCache& cache, CostLedger& ledger);

    PairJudgment judge(const PairQuery& q) override;
    std::vector<PairJudgment> judge_all(const std::vector<PairQuery>& qs) override;
    MembershipJudgment judge_membership(const std::string& id,
                                  const std::vector<std::string>& representative_ids) override;
    std::vector<std::string> generate_keyphrases(const Document& doc) override;
    int max_concurrent() const override { return cfg_.max_concurrent; }

private:
    struct Exchange {
        std::string response;
        std::int64_t tokens_in = 0;
        std::int64_t tokens_out = 0;
        bool cached = false;
    };
    Exchange run(const std::string& prompt);

    OracleConfig cfg_;
    PromptTemplate tmpl_;
    const DocumentSet& docs_;
    Transport& transport_;
    ResponseCache& cache_;
    CostLedger& ledger_;
};

// Answers from gold labels; never abstains, costs nothing.
class GoldOracle : public PairOracle {
public:
    explicit GoldOracle(GoldLabeling gold) : gold_(std::move(gold)) {}
    PairJudgment judge(const PairQuery& q) override;
    MembershipJudgment judge_membership(const std::string& id,
                                  const std::vector<std::string>& representative_ids) override;

private:
    GoldLabeling gold_;
};

// Replays cached responses; a miss is an error, never a network call.
class ReplayOracle : public PairOracle, public KeyphraseGenerator {
public:
    ReplayOracle(OracleConfig cfg, PromptTemplate tmpl, const DocumentSet& docs,
                 const ResponseCache& cache, CostLedger& ledger);

    PairJudgment judge(const PairQuery& q) override;
    MembershipJudgment judge_membership(const std::string& id,
                                  const std::vector<std::string>& representative_ids) override;
    std::vector<std::string> generate_keyphrases(const Document& doc) override;
    int max_concurrent() const override { return cfg_.max_concurrent; }

private:
    CacheRecord lookup(const std::string& prompt);

    OracleConfig cfg_;
    PromptTemplate tmpl_;
    const DocumentSet& docs_;
    const ResponseCache& cache_;
    CostLedger& ledger_;
};

// Free-function forms mirroring the operation contracts.
PairJudgment gold_judge(const GoldLabeling& gold, const PairQuery& q);
PairJudgment replay_judge(const ResponseCache& cache, const OracleConfig& cfg,
                          const PromptTemplate& tmpl, const DocumentSet& docs, const PairQuery& q);

}  // namespace fsc
