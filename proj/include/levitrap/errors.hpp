#pragma once

#include <stdexcept>
#include <string>

namespace levitrap {

/// Malformed input: unparsable config line, unknown unit, bad CSV.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0, std::string key = {})
        : std::runtime_error(format(what, line, key)), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& what, int line, const std::string& key) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "'" + key + "': ";
        return out + what;
    }

    int line_;
    std::string key_;
};

/// Input that parses but violates a model invariant (geometry, ranges, preconditions).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A numerical procedure failed: solver non-convergence, fit failure, no bracket.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trap is not confining along the named axis.
class NotConfiningError : public NumericalError {
public:
    NotConfiningError(const std::string& axis, double stiffness)
        : NumericalError("trap is not confining along " + axis + " (stiffness " +
                         std::to_string(stiffness) + " N/m)"),
          axis_(axis) {}
    const std::string& axis() const noexcept { return axis_; }

private:
    std::string axis_;
};

}  // namespace levitrap
