#include "fsc/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fsc {

namespace {

using nlohmann::json;

// Substitutes {name} placeholders from `values`; any other {name} token is a
// config error so broken templates fail loudly instead of emitting garbage
// prompts. A brace not opening a recognized {name} is passed through.
std::string substitute(const std::string& frame,
                       const std::vector<std::pair<std::string, const std::string*>>& values,
                       const std::string& where) {
    std::string out;
    out.reserve(frame.size());
    std::size_t i = 0;
    while (i < frame.size()) {
        if (frame[i] != '{') {
            out += frame[i++];
            continue;
        }
        const std::size_t close = frame.find('}', i + 1);
        if (close == std::string::npos) {
            out += frame.substr(i);
            break;
        }
        const std::string name = frame.substr(i + 1, close - i - 1);
        bool resolved = false;
        for (const auto& [key, value] : values) {
            if (key == name) {
                out += *value;
                resolved = true;
                break;
            }
        }
        if (!resolved) {
            bool identifier = !name.empty();
            for (char c : name)
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') identifier = false;
            if (identifier)
                throw config_error(where + ": unresolvable placeholder {" + name + "}");
            out += frame[i++];  // stray brace, keep literally
            continue;
        }
        i = close + 1;
    }
    return out;
}

std::string require_field(const json& j, const char* key, const std::string& origin) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw config_error(origin + ": missing string field '" + std::string(key) + "'");
    return j.at(key).get<std::string>();
}

}  // namespace

std::string format_contexts(std::span<const std::string> sentences) {
    const std::size_t count = std::min(sentences.size(), kMaxContextSentences);
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) out += '\n';
        out += static_cast<char>('a' + i);
        out += ") \"";
        out += sentences[i];
        out += '"';
    }
    return out;
}

PromptTemplate PromptTemplate::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open template file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

PromptTemplate PromptTemplate::parse(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(origin + ": not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw config_error(origin + ": template must be a JSON object");

    PromptTemplate t;
    t.instruction = require_field(j, "instruction", origin);
    if (j.contains("demonstrations")) {
        const json& demos = j.at("demonstrations");
        if (!demos.is_array())
            throw config_error(origin + ": 'demonstrations' must be an array of strings");
        for (const json& d : demos) {
            if (!d.is_string())
                throw config_error(origin + ": 'demonstrations' must be an array of strings");
            t.demonstrations.push_back(d.get<std::string>());
        }
        if (t.demonstrations.size() > 4)
            throw config_error(origin + ": at most 4 demonstrations allowed, got " +
                               std::to_string(t.demonstrations.size()));
    }
    t.pair_frame = require_field(j, "pair_frame", origin);
    t.keyphrase_frame = require_field(j, "keyphrase_frame", origin);

    // Validate placeholder sets up front so render never fails mid-run.
    static const std::string kEmpty;
    substitute(t.pair_frame,
               {{"entity1", &kEmpty}, {"entity2", &kEmpty}, {"contexts1", &kEmpty},
                {"contexts2", &kEmpty}},
               origin + " pair_frame");
    substitute(t.keyphrase_frame, {{"text", &kEmpty}}, origin + " keyphrase_frame");
    return t;
}

namespace {

std::string assemble(const std::string& instruction, const std::vector<std::string>& demos,
                     const std::string& framed) {
    std::string out = instruction;
    for (const std::string& d : demos) {
        out += "\n\n";
        out += d;
    }
    out += "\n\n";
    out += framed;
    return out;
}

std::string display_name(const Document& doc) {
    return doc.surface ? *doc.surface : doc.text;
}

}  // namespace

std::string PromptTemplate::render_pair(const Document& a, const Document& b) const {
    if (pair_frame.empty()) throw config_error("template has no pair_frame");
    const std::string e1 = display_name(a);
    const std::string e2 = display_name(b);
    const std::string c1 = format_contexts(a.context);
    const std::string c2 = format_contexts(b.context);
    const std::string framed = substitute(
        pair_frame,
        {{"entity1", &e1}, {"entity2", &e2}, {"contexts1", &c1}, {"contexts2", &c2}},
        "pair_frame");
    return assemble(instruction, demonstrations, framed);
}

std::string PromptTemplate::render_membership(const Document& x,
                                              std::span<const Document* const> reps) const {
    if (pair_frame.empty()) throw config_error("template has no pair_frame");
    if (reps.empty()) throw parameter_error("membership prompt needs at least one representative");
    std::string e2;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (i > 0) e2 += "; ";
        e2 += display_name(*reps[i]);
    }
    // Round-robin one context sentence per representative until the cap.
    std::vector<std::string> rep_contexts;
    for (std::size_t offset = 0; rep_contexts.size() < kMaxContextSentences; ++offset) {
        bool any = false;
        for (const Document* rep : reps) {
            if (offset < rep->context.size()) {
                any = true;
                rep_contexts.push_back(rep->context[offset]);
                if (rep_contexts.size() == kMaxContextSentences) break;
            }
        }
        if (!any) break;
    }
    const std::string e1 = display_name(x);
    const std::string c1 = format_contexts(x.context);
    const std::string c2 = format_contexts(rep_contexts);
    const std::string framed = substitute(
        pair_frame,
        {{"entity1", &e1}, {"entity2", &e2}, {"contexts1", &c1}, {"contexts2", &c2}},
        "pair_frame");
    return assemble(instruction, demonstrations, framed);
}

std::string PromptTemplate::render_keyphrase(const Document& doc) const {
    if (keyphrase_frame.empty()) throw config_error("template has no keyphrase_frame");
    const std::string framed =
        substitute(keyphrase_frame, {{"text", &doc.text}}, "keyphrase_frame");
    return assemble(instruction, demonstrations, framed);
}

}  // namespace fsc
