#include "fsc/cost.hpp"

#include <cctype>
#include <cstdlib>

namespace fsc {

namespace {

constexpr std::int64_t kPicoPerUnit = 1'000'000'000'000;  // 1e12

}  // namespace

Usd Usd::from_pico(std::int64_t pico) {
    Usd out;
    out.pico_ = pico;
    return out;
}

Usd Usd::parse(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    const std::size_t int_begin = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string int_part = text.substr(int_begin, pos - int_begin);
    std::string frac_part;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t frac_begin = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        frac_part = text.substr(frac_begin, pos - frac_begin);
    }
    if (pos != text.size() || (int_part.empty() && frac_part.empty()))
        throw parameter_error("not a plain decimal USD amount: '" + text + "'");
    if (frac_part.size() > 12)
        throw parameter_error("USD amount '" + text + "' has more than 12 decimal places");

    std::int64_t pico = 0;
    for (char c : int_part) {
        pico = pico * 10 + (c - '0');
        if (pico > std::int64_t{9'000'000} * kPicoPerUnit / 10)
            throw parameter_error("USD amount '" + text + "' out of range");
    }
    pico *= kPicoPerUnit;
    std::int64_t scale = kPicoPerUnit / 10;
    for (char c : frac_part) {
        pico += (c - '0') * scale;
        scale /= 10;
    }
    return from_pico(negative ? -pico : pico);
}

std::string Usd::str() const {
    std::int64_t v = pico_;
    std::string sign;
    if (v < 0) {
        sign = "-";
        v = -v;
    }
    const std::int64_t whole = v / kPicoPerUnit;
    std::int64_t frac = v % kPicoPerUnit;
    std::string frac_digits(12, '0');
    for (int i = 11; i >= 0; --i) {
        frac_digits[i] = static_cast<char>('0' + frac % 10);
        frac /= 10;
    }
    while (frac_digits.size() > 2 && frac_digits.back() == '0') frac_digits.pop_back();
    return sign + std::to_string(whole) + "." + frac_digits;
}

Usd& Usd::operator+=(Usd other) {
    pico_ += other.pico_;
    return *this;
}

Usd operator*(Usd price, std::int64_t count) { return Usd::from_pico(price.pico() * count); }

CostLedger::CostLedger(Usd price_in_per_1k, Usd price_out_per_1k) {
    if (price_in_per_1k.negative() || price_out_per_1k.negative())
        throw parameter_error("token prices must be non-negative");
    if (price_in_per_1k.pico() % 1000 != 0 || price_out_per_1k.pico() % 1000 != 0)
        throw parameter_error("token prices must have at most 9 decimal places");
    per_token_in_pico_ = price_in_per_1k.pico() / 1000;
    per_token_out_pico_ = price_out_per_1k.pico() / 1000;
}

void CostLedger::record(const std::string& query_hash, std::int64_t tokens_in,
                        std::int64_t tokens_out, bool cache_hit) {
    if (tokens_in < 0 || tokens_out < 0)
        throw parameter_error("token counts must be non-negative");
    LedgerEntry entry;
    entry.query_hash = query_hash;
    entry.tokens_in = tokens_in;
    entry.tokens_out = tokens_out;
    entry.cache_hit = cache_hit;
    if (!cache_hit)
        entry.usd = Usd::from_pico(tokens_in * per_token_in_pico_ +
                                   tokens_out * per_token_out_pico_);
    std::lock_guard<std::mutex> lock(mu_);
    entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> CostLedger::entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_;
}

LedgerTotals CostLedger::totals() const {
    std::lock_guard<std::mutex> lock(mu_);
    LedgerTotals t;
    t.entries = static_cast<std::int64_t>(entries_.size());
    for (const LedgerEntry& e : entries_) {
        if (e.cache_hit) {
            ++t.cache_hits;
            continue;
        }
        t.tokens_in += e.tokens_in;
        t.tokens_out += e.tokens_out;
        t.usd += e.usd;
    }
    if (t.entries > 0)
        t.hit_rate = static_cast<double>(t.cache_hits) / static_cast<double>(t.entries);
    return t;
}

LedgerTotals ledger_report(const CostLedger& ledger) { return ledger.totals(); }

}  // namespace fsc
