#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhpm {

// Precondition or invariant broken by the caller (dimension mismatch,
// non-monotone tick, non-finite value, ...). Maps to CLI exit code 3.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed or invalid configuration text. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem / stream failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ContractError(what);
}

inline void require_dim(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual)
        throw ContractError(std::string(what) + ": expected dim " + std::to_string(expected) +
                            ", got " + std::to_string(actual));
}

}  // namespace mhpm
