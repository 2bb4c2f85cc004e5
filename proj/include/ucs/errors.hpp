#pragma once

#include <stdexcept>
#include <string>

namespace ucs {

/// Invalid or inconsistent configuration, raised before any simulation work.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A protocol invariant (e.g. schedule maximality) was violated at run time.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

} // namespace ucs
