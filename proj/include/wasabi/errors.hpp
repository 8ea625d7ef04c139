#pragma once

#include <stdexcept>
#include <string>

namespace wasabi {

// Malformed or inconsistent user data (bad CSV rows, mismatched digests, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// An internal identity that must hold by construction did not.
class InvariantError : public std::logic_error {
public:
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace wasabi
