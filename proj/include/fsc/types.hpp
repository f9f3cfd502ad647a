#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fsc/error.hpp"

namespace fsc {

inline constexpr std::size_t kMaxContextSentences = 3;

struct Document {
    std::string id;
    std::string text;
    std::vector<std::string> context;  // at most kMaxContextSentences
    std::optional<std::string> surface;
    std::optional<std::string> gold;
};

// Ordered collection of documents. Ids are unique, texts non-empty, and
// surface forms are all-or-nothing: either every item carries one
// (canonicalization mode) or none does (text mode).
class DocumentSet {
public:
    DocumentSet() = default;
    explicit DocumentSet(std::vector<Document> items);

    std::size_t size() const { return items_.size(); }
    const Document& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<Document>& items() const { return items_; }

    bool contains(const std::string& id) const { return index_.count(id) > 0; }
    std::size_t index_of(const std::string& id) const;
    const Document& by_id(const std::string& id) const { return items_[index_of(id)]; }

    std::vector<std::string> ids() const;
    bool canonicalization_mode() const { return canonical_; }
    bool fully_labeled() const { return labeled_; }

private:
    std::vector<Document> items_;
    std::unordered_map<std::string, std::size_t> index_;
    bool canonical_ = false;
    bool labeled_ = false;
};

// Dense row-major matrix of float32 embeddings. Row i belongs to item i of
// the paired DocumentSet. Stored as float to keep the on-disk format
// lossless; all arithmetic downstream runs in double.
struct EmbeddingMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<float> data;  // n * d, row-major

    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t n_, std::size_t d_) : n(n_), d(d_), data(n_ * d_, 0.0f) {}

    std::span<const float> row(std::size_t i) const { return {data.data() + i * d, d}; }
    std::span<float> row(std::size_t i) { return {data.data() + i * d, d}; }

    // Throws validation_error on non-finite components or empty shape.
    void validate() const;
};

// Total assignment of item ids to cluster indices in [0, k). Empty clusters
// are representable: k may exceed the number of indices in use.
struct Clustering {
    std::size_t k = 0;
    std::map<std::string, int> assignment;

    int at(const std::string& id) const;
    bool operator==(const Clustering&) const = default;
};

struct GoldLabeling {
    std::map<std::string, std::string> labels;

    static GoldLabeling from_documents(const DocumentSet& docs);
    const std::string& at(const std::string& id) const;
};

}  // namespace fsc
