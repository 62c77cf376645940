#pragma once

#include <stdexcept>
#include <string>

namespace jetmech {

/// Base class for every error the engine raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric domain violation (division by zero, ln of a non-positive value, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Expression text could not be parsed; `offset` is the byte position of the
/// first character that made the input invalid.
struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& what, std::size_t offset_)
        : Error(what + " (at offset " + std::to_string(offset_) + ")"), offset(offset_) {}
};

/// A derivative order was requested that the jet or model does not carry.
struct OrderError : Error {
    using Error::Error;
};

/// The top-order coefficient vanishes identically; the equation of motion
/// cannot be solved for the highest derivative.
struct DegeneracyError : Error {
    using Error::Error;
};

/// An iterative solve (Newton root solve, adaptive step control) failed.
struct ConvergenceError : Error {
    using Error::Error;
};

/// Invalid or unknown configuration content; `key` names the offending entry.
struct ConfigError : Error {
    std::string key;
    ConfigError(const std::string& what, std::string key_)
        : Error(what), key(std::move(key_)) {}
};

} // namespace jetmech
