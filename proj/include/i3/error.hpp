#pragma once

#include <stdexcept>
#include <string>

namespace i3 {

// Malformed or inconsistent input data (bad rows, mismatched vectors,
// empty populations). The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration (scheme strings, boundary sets, flag combinations).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace i3
