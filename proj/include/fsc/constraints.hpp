#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fsc/error.hpp"

namespace fsc {

enum class Relation { must_link, cannot_link };

enum class ConstraintSource { llm, gold, human, replay };

std::string to_string(Relation r);
std::string to_string(ConstraintSource s);
Relation relation_from_string(const std::string& s);
ConstraintSource source_from_string(const std::string& s);

// Unordered pair constraint. Endpoints are canonicalized so a < b
// lexicographically; self-pairs are rejected.
struct Constraint {
    std::string a;
    std::string b;
    Relation relation;
    ConstraintSource source;

    Constraint(std::string a_, std::string b_, Relation rel, ConstraintSource src);

    std::pair<std::string, std::string> pair() const { return {a, b}; }
};

// Deduplicated set of pairwise constraints. A pair may be present with both
// relations (a noisy oracle can contradict itself); such direct conflicts,
// like closure-level ones, are surfaced by check_consistency rather than
// silently resolved here.
class ConstraintSet {
public:
    // Returns false when an identical (pair, relation) entry already exists.
    // The first insertion's source wins.
    bool add(Constraint c);

    std::size_t size() const { return must_.size() + cannot_.size(); }
    bool empty() const { return must_.empty() && cannot_.empty(); }

    const std::map<std::pair<std::string, std::string>, Constraint>& must_links() const {
        return must_;
    }
    const std::map<std::pair<std::string, std::string>, Constraint>& cannot_links() const {
        return cannot_;
    }

    // All constraints ordered by (a, b, relation); must-link sorts first.
    std::vector<Constraint> all() const;

    // Drops every cannot-link whose pair also appears as a must-link.
    // Returns the number of constraints removed.
    std::size_t drop_direct_conflicts();

private:
    std::map<std::pair<std::string, std::string>, Constraint> must_;
    std::map<std::pair<std::string, std::string>, Constraint> cannot_;
};

// Connected components of the must-link graph over `ids`. Unconstrained
// items come back as singletons. Components are ordered by their smallest
// member id, members sorted ascending. Constraints naming an id outside
// `ids` raise validation_error.
std::vector<std::vector<std::string>> mustlink_closure(const ConstraintSet& cs,
                                                       const std::vector<std::string>& ids);

// Every cannot-link whose endpoints fall into one must-link closure
// component. Empty result means the set is consistent. A pair carrying both
// relations shows up here too: its must-link edge puts both endpoints in one
// component.
std::vector<Constraint> check_consistency(const ConstraintSet& cs,
                                          const std::vector<std::string>& ids);

}  // namespace fsc
