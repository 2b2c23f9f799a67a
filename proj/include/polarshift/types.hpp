#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace polarshift {

/// Stable account identifier. Handles can change; ids do not.
struct UserId {
    std::string value;

    UserId() = default;
    explicit UserId(std::string v) : value(std::move(v)) {}

    auto operator<=>(const UserId&) const = default;
    bool operator==(const UserId&) const = default;
};

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed, missing or inconsistent input data (exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver gives up (exit code 4).
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace polarshift

template <>
struct std::hash<polarshift::UserId> {
    std::size_t operator()(const polarshift::UserId& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};
