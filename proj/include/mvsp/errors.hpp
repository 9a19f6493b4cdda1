#pragma once

#include <stdexcept>
#include <string>

namespace mvsp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An instance (or config) violates one of its invariants. `field()` names the
/// offending field as a dotted path, e.g. `catalog.models[0].variants[1].base_latency.E3`.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class UnreachableError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// A solution value is non-integral or outside its bounds.
class IntegrityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// The brute-force oracle refuses search spaces above its guard.
class SearchSpaceError : public Error {
public:
    SearchSpaceError(double size, double guard)
        : Error("search space of " + std::to_string(size) + " points exceeds guard of " +
                std::to_string(guard)),
          size_(size) {}

    double size() const noexcept { return size_; }

private:
    double size_;
};

}  // namespace mvsp
