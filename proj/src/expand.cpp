#include "fsc/expand.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace fsc {

namespace {

using nlohmann::json;

constexpr char kMagic[] = "FSCEMB1";  // 7 bytes on disk, no terminator
constexpr std::size_t kMagicLen = 7;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path, const char* what) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw validation_error(path + ": truncated while reading " + what);
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) |
           (static_cast<std::uint32_t>(buf[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in, const std::string& path) {
    const std::uint32_t bits = get_u32(in, path, "vector data");
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

KeyedEmbeddings load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open embedding file: " + path);
    char magic[kMagicLen];
    if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
        throw validation_error(path + ": not an FSCEMB1 embedding file");
    const std::uint32_t n = get_u32(in, path, "row count");
    const std::uint32_t d = get_u32(in, path, "dimension");
    if (n == 0 || d == 0) throw validation_error(path + ": empty embedding matrix");

    KeyedEmbeddings out;
    out.matrix = EmbeddingMatrix(n, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * d; ++i)
        out.matrix.data[i] = get_f32(in, path);
    out.keys.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t len = get_u32(in, path, "key length");
        std::string key(len, '\0');
        if (len > 0 && !in.read(key.data(), len))
            throw validation_error(path + ": truncated while reading key " + std::to_string(i));
        out.keys.push_back(std::move(key));
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw validation_error(path + ": trailing bytes after last key");
    out.matrix.validate();
    return out;
}

void save_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                     const std::vector<std::string>& keys) {
    matrix.validate();
    if (keys.size() != matrix.n)
        throw validation_error("key count " + std::to_string(keys.size()) +
                               " does not match row count " + std::to_string(matrix.n));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("cannot write embedding file: " + path);
    out.write(kMagic, kMagicLen);
    put_u32(out, static_cast<std::uint32_t>(matrix.n));
    put_u32(out, static_cast<std::uint32_t>(matrix.d));
    for (float v : matrix.data) put_f32(out, v);
    for (const std::string& key : keys) {
        put_u32(out, static_cast<std::uint32_t>(key.size()));
        out.write(key.data(), static_cast<std::streamsize>(key.size()));
    }
    if (!out) throw validation_error("write failed: " + path);
}

FileLookupProvider::FileLookupProvider(const std::string& path)
    : store_(load_embeddings(path)) {
    build_index();
}

FileLookupProvider::FileLookupProvider(KeyedEmbeddings store) : store_(std::move(store)) {
    store_.matrix.validate();
    if (store_.keys.size() != store_.matrix.n)
        throw validation_error("embedding store key count does not match row count");
    build_index();
}

void FileLookupProvider::build_index() {
    for (std::size_t i = 0; i < store_.keys.size(); ++i)
        index_.emplace(store_.keys[i], i);  // first occurrence wins
}

EmbeddingMatrix FileLookupProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw parameter_error("embed: empty text list");
    EmbeddingMatrix out(texts.size(), store_.matrix.d);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto it = index_.find(texts[i]);
        if (it == index_.end())
            throw validation_error("no precomputed embedding for text: \"" + texts[i] + "\"");
        const auto src = store_.matrix.row(it->second);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

EmbeddingMatrix HttpEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw parameter_error("embed: empty text list");
    const std::size_t scheme = endpoint_.find("://");
    if (scheme == std::string::npos)
        throw config_error("embedding endpoint must include a scheme: " + endpoint_);
    const std::size_t slash = endpoint_.find('/', scheme + 3);
    const std::string base = slash == std::string::npos ? endpoint_ : endpoint_.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : endpoint_.substr(slash);

    httplib::Client client(base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(300, 0);
    const std::string payload = json{{"texts", texts}}.dump();
    auto res = client.Post(path, payload, "application/json");
    if (!res)
        throw transport_error("embedding request failed: " + httplib::to_string(res.error()), "");
    if (res->status != 200)
        throw transport_error("embedding request failed: HTTP " + std::to_string(res->status),
                              "");
    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw transport_error(std::string("malformed embedding response: ") + e.what(), "");
    }
    if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
        reply["vectors"].size() != texts.size())
        throw transport_error("embedding response must hold one vector per input text", "");

    const auto& vectors = reply["vectors"];
    const std::size_t d = vectors.empty() ? 0 : vectors[0].size();
    if (d == 0) throw transport_error("embedding response has zero-dimensional vectors", "");
    EmbeddingMatrix out(texts.size(), d);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto& vec = vectors[i];
        if (!vec.is_array() || vec.size() != d)
            throw transport_error("embedding response rows have inconsistent dimensions", "");
        for (std::size_t t = 0; t < d; ++t)
            out.row(i)[t] = vec[t].get<float>();
    }
    out.validate();
    return out;
}

ConcatMode concat_mode_from_string(const std::string& s) {
    if (s == "l2_each_part") return ConcatMode::l2_each_part;
    if (s == "raw_concat") return ConcatMode::raw_concat;
    throw config_error("unknown concat mode: '" + s + "' (expected l2_each_part or raw_concat)");
}

std::vector<std::string> keyphrase_texts(const DocumentSet& docs, KeyphraseGenerator& oracle) {
    std::vector<std::string> out(docs.size());
    std::vector<std::exception_ptr> errors(docs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= docs.size()) return;
            try {
                const std::vector<std::string> phrases = oracle.generate_keyphrases(docs[i]);
                if (phrases.empty()) {
                    out[i] = docs[i].text;  // fallback: the document itself
                    continue;
                }
                std::string joined;
                for (std::size_t p = 0; p < phrases.size(); ++p) {
                    if (p > 0) joined += ", ";
                    joined += phrases[p];
                }
                out[i] = std::move(joined);
            } catch (const transport_error& e) {
                errors[i] = std::make_exception_ptr(transport_error(
                    std::string(e.what()) + " (document '" + docs[i].id + "')", e.query_hash()));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::min<std::size_t>(
        std::max(1, oracle.max_concurrent()), docs.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

void write_part(const EmbeddingMatrix& src, EmbeddingMatrix& dst, std::size_t row,
                std::size_t offset, bool normalize) {
    const auto in = src.row(row);
    const auto out = dst.row(row);
    double norm = 0.0;
    if (normalize) {
        for (float v : in) norm += static_cast<double>(v) * static_cast<double>(v);
        norm = std::sqrt(norm);
    }
    for (std::size_t t = 0; t < in.size(); ++t) {
        const double v = static_cast<double>(in[t]);
        out[offset + t] = static_cast<float>(normalize && norm > 0.0 ? v / norm : v);
    }
}

}  // namespace

ExpandedMatrix expand_representation(const EmbeddingMatrix& base, const EmbeddingMatrix& keys,
                                     ConcatMode mode) {
    base.validate();
    keys.validate();
    if (base.n != keys.n)
        throw parameter_error("expand_representation: base has " + std::to_string(base.n) +
                              " rows but keyphrase matrix has " + std::to_string(keys.n));
    ExpandedMatrix out;
    out.base = base;
    out.keyphrase = keys;
    out.combined = EmbeddingMatrix(base.n, base.d + keys.d);
    const bool normalize = mode == ConcatMode::l2_each_part;
    for (std::size_t i = 0; i < base.n; ++i) {
        write_part(base, out.combined, i, 0, normalize);
        write_part(keys, out.combined, i, base.d, normalize);
    }
    return out;
}

}  // namespace fsc
