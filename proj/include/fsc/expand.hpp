#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "fsc/oracle.hpp"
#include "fsc/types.hpp"

namespace fsc {

// Embedding file contents: vectors plus the text key of each row.
struct KeyedEmbeddings {
    EmbeddingMatrix matrix;
    std::vector<std::string> keys;
};

// Binary embedding file format:
//   magic "FSCEMB1" (7 bytes)
//   u32 n, u32 d          little-endian
//   n*d float32           little-endian, row-major
//   n keys                each: u32 byte length (LE) + UTF-8 bytes
KeyedEmbeddings load_embeddings(const std::string& path);
void save_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                     const std::vector<std::string>& keys);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // One vector per input text, fixed dimension, finite components.
    virtual EmbeddingMatrix embed(const std::vector<std::string>& texts) = 0;
};

// Precomputed vectors keyed by exact text. A missing key is an error, not a
// zero vector: a miss means the upstream pipeline embedded different text.
class FileLookupProvider : public EmbeddingProvider {
public:
    explicit FileLookupProvider(const std::string& path);
    explicit FileLookupProvider(KeyedEmbeddings store);
    EmbeddingMatrix embed(const std::vector<std::string>& texts) override;

private:
    void build_index();
    KeyedEmbeddings store_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Remote embedding service: POST {"texts": [...]} -> {"vectors": [[...]]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(std::string endpoint);
    EmbeddingMatrix embed(const std::vector<std::string>& texts) override;

private:
    std::string endpoint_;
};

enum class ConcatMode { l2_each_part, raw_concat };

ConcatMode concat_mode_from_string(const std::string& s);

struct ExpandedMatrix {
    EmbeddingMatrix base;       // d1
    EmbeddingMatrix keyphrase;  // d2
    EmbeddingMatrix combined;   // d1 + d2
};

// Per-document keyphrase string: generated phrases joined with ", ", falling
// back to the document's own text when the oracle yields nothing. Row order
// follows docs; generation parallelizes up to oracle.max_concurrent().
std::vector<std::string> keyphrase_texts(const DocumentSet& docs, KeyphraseGenerator& oracle);

// Concatenates base and keyphrase views row by row. l2_each_part normalizes
// each part to unit Euclidean norm first (zero vectors pass through).
ExpandedMatrix expand_representation(const EmbeddingMatrix& base, const EmbeddingMatrix& keys,
                                     ConcatMode mode);

}  // namespace fsc
