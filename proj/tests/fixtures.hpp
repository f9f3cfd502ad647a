// Shared test fixtures: synthetic blob datasets, temp files, tiny helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fsc/rng.hpp"
#include "fsc/types.hpp"

namespace fixtures {

struct Blobs {
    fsc::DocumentSet docs;       // gold label "c<j>" per point, ids zero-padded
    fsc::EmbeddingMatrix X;
    std::vector<int> labels;     // gold cluster index per row
};

inline std::string padded_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04zu", i);
    return buf;
}

// Well-separated Gaussian blobs: centers ~`sep` apart on axis-aligned
// corners, unit variance. Deterministic in `seed`.
inline Blobs make_blobs(std::size_t n, std::size_t k, std::size_t d, std::uint64_t seed,
                        double sep = 100.0, double sigma = 1.0) {
    std::mt19937_64 gen(seed);
    auto gauss = [&gen]() {
        // Box-Muller on the library's uniform helper keeps runs identical
        // across platforms.
        double u1 = fsc::uniform01(gen);
        while (u1 <= 0.0) u1 = fsc::uniform01(gen);
        const double u2 = fsc::uniform01(gen);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    Blobs b;
    b.X = fsc::EmbeddingMatrix(n, d);
    std::vector<fsc::Document> docs;
    docs.reserve(n);
    b.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i % k;
        b.labels.push_back(static_cast<int>(j));
        for (std::size_t t = 0; t < d; ++t) {
            const double center = (j >> (t % 8)) & 1 ? sep : 0.0;
            const double extra = (t < k) ? (t == j ? sep : 0.0) : 0.0;
            b.X.row(i)[t] = static_cast<float>(center + extra + sigma * gauss());
        }
        fsc::Document doc;
        doc.id = padded_id(i);
        doc.text = "point " + doc.id;
        doc.gold = "c" + std::to_string(j);
        docs.push_back(std::move(doc));
    }
    b.docs = fsc::DocumentSet(std::move(docs));
    return b;
}

// A fresh unique temp directory; the caller owns cleanup (or leaves it to
// the OS — paths live under the system temp root).
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto base = std::filesystem::temp_directory_path() / "fsc_tests";
    std::filesystem::create_directories(base);
    auto dir = base / (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

// Documents with explicit gold labels and optional surfaces.
inline fsc::DocumentSet tiny_docs(
    const std::vector<std::pair<std::string, std::string>>& id_and_label) {
    std::vector<fsc::Document> docs;
    for (const auto& [id, label] : id_and_label) {
        fsc::Document d;
        d.id = id;
        d.text = "text of " + id;
        d.gold = label;
        docs.push_back(std::move(d));
    }
    return fsc::DocumentSet(std::move(docs));
}

// Clustering literal: {{"a",0},{"b",1},...}
inline fsc::Clustering clustering_of(const std::vector<std::pair<std::string, int>>& items) {
    fsc::Clustering c;
    int maxj = -1;
    for (const auto& [id, j] : items) {
        c.assignment[id] = j;
        if (j > maxj) maxj = j;
    }
    c.k = static_cast<std::size_t>(maxj + 1);
    return c;
}

}  // namespace fixtures
