#include "fsc/constraints.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace fsc {

std::string to_string(Relation r) {
    return r == Relation::must_link ? "must" : "cannot";
}

std::string to_string(ConstraintSource s) {
    switch (s) {
        case ConstraintSource::llm: return "llm";
        case ConstraintSource::gold: return "gold";
        case ConstraintSource::human: return "human";
        case ConstraintSource::replay: return "replay";
    }
    return "llm";
}

Relation relation_from_string(const std::string& s) {
    if (s == "must") return Relation::must_link;
    if (s == "cannot") return Relation::cannot_link;
    throw validation_error("unknown constraint relation '" + s + "' (expected 'must' or 'cannot')");
}

ConstraintSource source_from_string(const std::string& s) {
    if (s == "llm") return ConstraintSource::llm;
    if (s == "gold") return ConstraintSource::gold;
    if (s == "human") return ConstraintSource::human;
    if (s == "replay") return ConstraintSource::replay;
    throw validation_error("unknown constraint source '" + s + "'");
}

Constraint::Constraint(std::string a_, std::string b_, Relation rel, ConstraintSource src)
    : a(std::move(a_)), b(std::move(b_)), relation(rel), source(src) {
    if (a == b) throw validation_error("self-pair constraint on id '" + a + "'");
    if (b < a) std::swap(a, b);
}

bool ConstraintSet::add(Constraint c) {
    auto& bucket = c.relation == Relation::must_link ? must_ : cannot_;
    auto key = c.pair();
    return bucket.emplace(std::move(key), std::move(c)).second;
}

std::vector<Constraint> ConstraintSet::all() const {
    std::vector<Constraint> out;
    out.reserve(size());
    auto mi = must_.begin();
    auto ci = cannot_.begin();
    while (mi != must_.end() || ci != cannot_.end()) {
        if (ci == cannot_.end() || (mi != must_.end() && mi->first <= ci->first)) {
            out.push_back(mi->second);
            ++mi;
        } else {
            out.push_back(ci->second);
            ++ci;
        }
    }
    return out;
}

std::size_t ConstraintSet::drop_direct_conflicts() {
    std::size_t dropped = 0;
    for (auto it = cannot_.begin(); it != cannot_.end();) {
        if (must_.count(it->first)) {
            it = cannot_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    return dropped;
}

namespace {

// Union-find keyed by position in `ids`.
struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::unordered_map<std::string, std::size_t> index_ids(const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!index.emplace(ids[i], i).second)
            throw validation_error("duplicate id '" + ids[i] + "' in id list");
    }
    return index;
}

std::size_t resolve(const std::unordered_map<std::string, std::size_t>& index,
                    const std::string& id) {
    auto it = index.find(id);
    if (it == index.end())
        throw validation_error("constraint references unknown id '" + id + "'");
    return it->second;
}

DisjointSet closure_components(const ConstraintSet& cs,
                               const std::unordered_map<std::string, std::size_t>& index) {
    DisjointSet dsu(index.size());
    for (const auto& [pair, c] : cs.must_links())
        dsu.unite(resolve(index, c.a), resolve(index, c.b));
    return dsu;
}

}  // namespace

std::vector<std::vector<std::string>> mustlink_closure(const ConstraintSet& cs,
                                                       const std::vector<std::string>& ids) {
    auto index = index_ids(ids);
    // Validate cannot-link ids too; the op contract rejects any unknown id.
    for (const auto& [pair, c] : cs.cannot_links()) {
        resolve(index, c.a);
        resolve(index, c.b);
    }
    DisjointSet dsu = closure_components(cs, index);

    std::map<std::size_t, std::vector<std::string>> by_root;
    for (std::size_t i = 0; i < ids.size(); ++i) by_root[dsu.find(i)].push_back(ids[i]);

    std::vector<std::vector<std::string>> components;
    components.reserve(by_root.size());
    for (auto& [root, members] : by_root) {
        std::sort(members.begin(), members.end());
        components.push_back(std::move(members));
    }
    std::sort(components.begin(), components.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.front() < rhs.front(); });
    return components;
}

std::vector<Constraint> check_consistency(const ConstraintSet& cs,
                                          const std::vector<std::string>& ids) {
    auto index = index_ids(ids);
    DisjointSet dsu = closure_components(cs, index);
    std::vector<Constraint> conflicts;
    for (const auto& [pair, c] : cs.cannot_links()) {
        if (dsu.find(resolve(index, c.a)) == dsu.find(resolve(index, c.b)))
            conflicts.push_back(c);
    }
    return conflicts;
}

}  // namespace fsc
