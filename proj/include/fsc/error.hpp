#pragma once

#include <stdexcept>
#include <string>

namespace fsc {

// Bad input data or files: unknown ids, malformed records, inconsistent
// constraint sets. CLI exit code 1.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-range arguments to library operations (k > n, empty grid, ...).
class parameter_error : public std::runtime_error {
public:
    explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken oracle configuration: unreadable template, missing placeholder.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Transport failure that survived the retry policy. Carries the hash of the
// query that failed so the caller can resume. CLI exit code 2.
class transport_error : public std::runtime_error {
public:
    transport_error(const std::string& msg, std::string query_hash)
        : std::runtime_error(msg), query_hash_(std::move(query_hash)) {}
    const std::string& query_hash() const { return query_hash_; }

private:
    std::string query_hash_;
};

}  // namespace fsc
