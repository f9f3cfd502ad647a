#pragma once

#include <string>

#include "fsc/error.hpp"

namespace fsc {

enum class QueryPhase { explore, consolidate, closest_pair };

const char* to_string(QueryPhase phase);
QueryPhase phase_from_string(const std::string& s);

// A pair submitted to the oracle. Ids are held in canonical (a < b) order so
// the same pair always hashes and caches identically.
struct PairQuery {
    std::string a;
    std::string b;
    QueryPhase phase = QueryPhase::explore;

    PairQuery(std::string a_in, std::string b_in, QueryPhase phase_in)
        : a(std::move(a_in)), b(std::move(b_in)), phase(phase_in) {
        if (a == b) throw validation_error("pair query pairs an item with itself: '" + a + "'");
        if (b < a) std::swap(a, b);
    }
};

inline const char* to_string(QueryPhase phase) {
    switch (phase) {
        case QueryPhase::explore: return "explore";
        case QueryPhase::consolidate: return "consolidate";
        case QueryPhase::closest_pair: return "closest_pair";
    }
    return "unknown";
}

inline QueryPhase phase_from_string(const std::string& s) {
    if (s == "explore") return QueryPhase::explore;
    if (s == "consolidate") return QueryPhase::consolidate;
    if (s == "closest_pair") return QueryPhase::closest_pair;
    throw validation_error("unknown query phase '" + s + "'");
}

}  // namespace fsc
