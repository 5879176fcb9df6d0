#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace chronicle {

// Base class for all library errors. The CLI maps any Error to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: missing column, unparseable date or number, bad header.
class FormatError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that fails a quality rule (e.g. a gap wider than max_gap).
class DataQualityError : public Error {
public:
    using Error::Error;
};

// A value outside the mathematical domain of an operation (e.g. log of a
// nonpositive price). Carries the offending sample index when known.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg, std::optional<std::size_t> index = std::nullopt)
        : Error(msg), index_(index) {}

    std::optional<std::size_t> index() const { return index_; }

private:
    std::optional<std::size_t> index_;
};

// Invalid configuration: infeasible window sizes, nonpositive step sizes, etc.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Series too short for the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

// Two series that must share a sampling grid do not.
class GridError : public Error {
public:
    using Error::Error;
};

}  // namespace chronicle
