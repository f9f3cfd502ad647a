#include "fsc/types.hpp"

#include <cmath>

namespace fsc {

DocumentSet::DocumentSet(std::vector<Document> items) : items_(std::move(items)) {
    index_.reserve(items_.size());
    std::size_t with_surface = 0;
    std::size_t with_gold = 0;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const Document& doc = items_[i];
        if (doc.id.empty()) throw validation_error("dataset: empty id at row " + std::to_string(i));
        if (!index_.emplace(doc.id, i).second)
            throw validation_error("dataset: duplicate id '" + doc.id + "'");
        if (doc.text.empty()) throw validation_error("dataset: empty text for id '" + doc.id + "'");
        if (doc.context.size() > kMaxContextSentences)
            throw validation_error("dataset: more than " + std::to_string(kMaxContextSentences) +
                                   " context sentences for id '" + doc.id + "'");
        if (doc.surface) ++with_surface;
        if (doc.gold) ++with_gold;
    }
    if (with_surface != 0 && with_surface != items_.size())
        throw validation_error("dataset: surface forms must be present on all items or none");
    canonical_ = !items_.empty() && with_surface == items_.size();
    labeled_ = !items_.empty() && with_gold == items_.size();
}

std::size_t DocumentSet::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw validation_error("unknown document id '" + id + "'");
    return it->second;
}

std::vector<std::string> DocumentSet::ids() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const Document& doc : items_) out.push_back(doc.id);
    return out;
}

void EmbeddingMatrix::validate() const {
    if (n < 1 || d < 1) throw validation_error("embedding matrix must have n >= 1 and d >= 1");
    if (data.size() != n * d) throw validation_error("embedding matrix storage size mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i]))
            throw validation_error("non-finite embedding component at row " +
                                   std::to_string(i / d) + ", column " + std::to_string(i % d));
    }
}

int Clustering::at(const std::string& id) const {
    auto it = assignment.find(id);
    if (it == assignment.end()) throw validation_error("clustering: unassigned id '" + id + "'");
    return it->second;
}

GoldLabeling GoldLabeling::from_documents(const DocumentSet& docs) {
    GoldLabeling gold;
    for (const Document& doc : docs.items()) {
        if (!doc.gold)
            throw validation_error("gold labeling requires a gold label on every item; missing for '" +
                                   doc.id + "'");
        gold.labels.emplace(doc.id, *doc.gold);
    }
    return gold;
}

const std::string& GoldLabeling::at(const std::string& id) const {
    auto it = labels.find(id);
    if (it == labels.end()) throw validation_error("gold labeling: unlabeled id '" + id + "'");
    return it->second;
}

}  // namespace fsc
