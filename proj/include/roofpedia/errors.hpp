#pragma once

#include <stdexcept>
#include <string>

namespace roofpedia {

// Precondition violated by a caller-supplied value (bad zoom, empty list, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input data that cannot be interpreted (malformed JSON, corrupt PNG, id mismatch).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or command-line usage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace roofpedia
