#include "fsc/jsonl.hpp"

#include <fstream>

#include <json.hpp>

namespace fsc {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw validation_error("cannot open file '" + file.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw validation_error("cannot write file '" + file.string() + "'");
    return out;
}

json parse_line(const std::string& line, const std::filesystem::path& file, std::size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw validation_error(file.string() + ":" + std::to_string(lineno) +
                               ": expected a JSON object");
    return j;
}

// Strips a UTF-8 BOM if an upstream tool added one; we never write them.
void strip_bom(std::string& line) {
    if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
        line.erase(0, 3);
}

template <typename Fn>
void for_each_line(const std::filesystem::path& file, Fn fn) {
    std::ifstream in = open_in(file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) strip_bom(line);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fn(parse_line(line, file, lineno), lineno);
    }
}

std::string require_string(const json& j, const char* key, const std::filesystem::path& file,
                           std::size_t lineno) {
    if (!j.contains(key) || !j[key].is_string())
        throw validation_error(file.string() + ":" + std::to_string(lineno) +
                               ": missing string field \"" + key + "\"");
    return j[key].get<std::string>();
}

}  // namespace

DocumentSet load_dataset(const std::filesystem::path& file) {
    std::vector<Document> items;
    for_each_line(file, [&](const json& j, std::size_t lineno) {
        Document doc;
        doc.id = require_string(j, "id", file, lineno);
        doc.text = require_string(j, "text", file, lineno);
        if (j.contains("context")) {
            if (!j["context"].is_array())
                throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                       ": \"context\" must be an array of strings");
            for (const auto& s : j["context"]) {
                if (!s.is_string())
                    throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                           ": \"context\" must be an array of strings");
                doc.context.push_back(s.get<std::string>());
            }
        }
        if (j.contains("surface") && !j["surface"].is_null())
            doc.surface = j["surface"].get<std::string>();
        if (j.contains("gold") && !j["gold"].is_null())
            doc.gold = j["gold"].get<std::string>();
        items.push_back(std::move(doc));
    });
    try {
        return DocumentSet(std::move(items));
    } catch (const validation_error& e) {
        throw validation_error(file.string() + ": " + e.what());
    }
}

void save_dataset(const std::filesystem::path& file, const DocumentSet& docs) {
    std::ofstream out = open_out(file);
    for (const Document& doc : docs.items()) {
        json j{{"id", doc.id}, {"text", doc.text}, {"context", doc.context}};
        if (doc.surface) j["surface"] = *doc.surface;
        if (doc.gold) j["gold"] = *doc.gold;
        out << j.dump() << '\n';
    }
}

ConstraintSet load_constraints(const std::filesystem::path& file,
                               const ConstraintLoadOptions& opts) {
    ConstraintSet cs;
    for_each_line(file, [&](const json& j, std::size_t lineno) {
        try {
            cs.add(Constraint(require_string(j, "a", file, lineno),
                              require_string(j, "b", file, lineno),
                              relation_from_string(require_string(j, "relation", file, lineno)),
                              source_from_string(require_string(j, "source", file, lineno))));
        } catch (const validation_error& e) {
            throw validation_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    if (opts.drop_conflicts) {
        cs.drop_direct_conflicts();
    } else {
        for (const auto& [pair, c] : cs.cannot_links()) {
            if (cs.must_links().count(pair))
                throw validation_error(file.string() + ": pair (" + c.a + ", " + c.b +
                                       ") appears with both relations; rerun with --drop-conflicts"
                                       " to keep the must-link side");
        }
    }
    return cs;
}

void save_constraints(const std::filesystem::path& file, const std::vector<Constraint>& cs) {
    std::ofstream out = open_out(file);
    for (const Constraint& c : cs) {
        json j{{"a", c.a}, {"b", c.b}, {"relation", to_string(c.relation)},
               {"source", to_string(c.source)}};
        out << j.dump() << '\n';
    }
}

std::vector<Constraint> load_constraint_list(const std::filesystem::path& file) {
    std::vector<Constraint> out;
    for_each_line(file, [&](const json& j, std::size_t lineno) {
        try {
            out.emplace_back(require_string(j, "a", file, lineno),
                             require_string(j, "b", file, lineno),
                             relation_from_string(require_string(j, "relation", file, lineno)),
                             source_from_string(require_string(j, "source", file, lineno)));
        } catch (const validation_error& e) {
            throw validation_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

std::vector<PairQuery> load_pairs(const std::filesystem::path& file) {
    std::vector<PairQuery> out;
    for_each_line(file, [&](const json& j, std::size_t lineno) {
        try {
            out.emplace_back(require_string(j, "a", file, lineno),
                             require_string(j, "b", file, lineno),
                             phase_from_string(require_string(j, "phase", file, lineno)));
        } catch (const validation_error& e) {
            throw validation_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

void save_pairs(const std::filesystem::path& file, const std::vector<PairQuery>& pairs) {
    std::ofstream out = open_out(file);
    for (const PairQuery& q : pairs) {
        json j{{"a", q.a}, {"b", q.b}, {"phase", to_string(q.phase)}};
        out << j.dump() << '\n';
    }
}

Clustering load_clustering(const std::filesystem::path& file) {
    Clustering c;
    int max_index = -1;
    for_each_line(file, [&](const json& j, std::size_t lineno) {
        std::string id = require_string(j, "id", file, lineno);
        if (!j.contains("cluster") || !j["cluster"].is_number_integer())
            throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                   ": missing integer field \"cluster\"");
        int cluster = j["cluster"].get<int>();
        if (cluster < 0)
            throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                   ": negative cluster index");
        if (!c.assignment.emplace(std::move(id), cluster).second)
            throw validation_error(file.string() + ":" + std::to_string(lineno) +
                                   ": duplicate id in clustering");
        max_index = std::max(max_index, cluster);
    });
    c.k = static_cast<std::size_t>(max_index + 1);
    return c;
}

void save_clustering(const std::filesystem::path& file, const Clustering& c,
                     const std::vector<std::string>& id_order) {
    std::ofstream out = open_out(file);
    for (const std::string& id : id_order) {
        json j{{"id", id}, {"cluster", c.at(id)}};
        out << j.dump() << '\n';
    }
}

}  // namespace fsc
