#pragma once

#include <span>
#include <string>
#include <vector>

#include "fsc/types.hpp"

namespace fsc {

// Prompt template loaded from a JSON file: a task instruction, up to four
// verbatim demonstration blocks, and placeholder frames for the two query
// kinds. Placeholder substitution applies to frames only; instruction and
// demonstrations are copied as written.
//
// pair_frame placeholders: {entity1} {entity2} {contexts1} {contexts2}
// keyphrase_frame placeholders: {text}
struct PromptTemplate {
    std::string instruction;
    std::vector<std::string> demonstrations;
    std::string pair_frame;
    std::string keyphrase_frame;

    static PromptTemplate load(const std::string& path);
    static PromptTemplate parse(const std::string& json_text, const std::string& origin);

    // Full prompt for "do these two items link": instruction, demonstration
    // blocks, then the framed pair with up to 3 context sentences each.
    std::string render_pair(const Document& a, const Document& b) const;
    // Cluster-membership variant used by post-correction: the second entity
    // slot lists every representative, contexts drawn round-robin.
    std::string render_membership(const Document& x, std::span<const Document* const> reps) const;
    // Full keyphrase-generation prompt for one document.
    std::string render_keyphrase(const Document& doc) const;
};

// Context sentences formatted one per line as: a) "sentence"
std::string format_contexts(std::span<const std::string> sentences);

}  // namespace fsc
