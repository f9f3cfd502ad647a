#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "fsc/error.hpp"

namespace fsc {

// Exact decimal USD amount held as integer pico-dollars (1e-12 USD). A
// per-1K-token price with at most 9 decimal places divides exactly into a
// per-token price, so ledger totals never see floating-point drift.
class Usd {
public:
    Usd() = default;

    static Usd from_pico(std::int64_t pico);
    // Plain decimal literal with up to 12 fractional digits ("0.002").
    static Usd parse(const std::string& text);

    std::int64_t pico() const { return pico_; }
    bool negative() const { return pico_ < 0; }
    // Trimmed decimal with at least two places: "0.00", "0.002", "1.50".
    std::string str() const;

    Usd& operator+=(Usd other);
    friend Usd operator+(Usd lhs, Usd rhs) { return lhs += rhs; }
    friend Usd operator*(Usd price, std::int64_t count);
    auto operator<=>(const Usd&) const = default;

private:
    std::int64_t pico_ = 0;
};

struct LedgerEntry {
    std::string query_hash;
    std::int64_t tokens_in = 0;
    std::int64_t tokens_out = 0;
    Usd usd;  // zero for cache hits
    bool cache_hit = false;
};

struct LedgerTotals {
    std::int64_t entries = 0;
    std::int64_t cache_hits = 0;
    std::int64_t tokens_in = 0;   // billed (non-cache-hit) tokens
    std::int64_t tokens_out = 0;
    Usd usd;
    double hit_rate = 0.0;
};

// Append-only record of oracle spend. Prices are per 1K tokens and must
// have at most 9 decimal places so the per-token rate is exact.
class CostLedger {
public:
    CostLedger(Usd price_in_per_1k, Usd price_out_per_1k);

    void record(const std::string& query_hash, std::int64_t tokens_in, std::int64_t tokens_out,
                bool cache_hit);
    std::vector<LedgerEntry> entries() const;
    LedgerTotals totals() const;

private:
    std::int64_t per_token_in_pico_ = 0;
    std::int64_t per_token_out_pico_ = 0;
    mutable std::mutex mu_;
    std::vector<LedgerEntry> entries_;
};

LedgerTotals ledger_report(const CostLedger& ledger);

}  // namespace fsc
