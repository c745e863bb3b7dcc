#pragma once

#include <stdexcept>
#include <string>

namespace qcm {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape disagreement between matrices, or between a matrix and its layout.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Bad argument value (out-of-range angle, unknown label or name, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A density matrix or unitary drifted outside its numerical tolerances.
// The CLI maps this to exit code 2.
class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& what, long step = -1)
        : Error(step >= 0 ? what + " (at collision " + std::to_string(step) + ")" : what),
          step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

// Malformed or inconsistent configuration document.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::string field = {}, int line = 0, int column = 0)
        : Error(format(what, field, line, column)), message_(what), field_(std::move(field)), line_(line),
          column_(column) {}

    // Message without the location prefix.
    const std::string& message() const noexcept { return message_; }
    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, const std::string& field, int line, int column) {
        std::string out;
        if (line > 0) {
            out += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
        }
        if (!field.empty()) {
            out += "'" + field + "': ";
        }
        return out + what;
    }

    std::string message_;
    std::string field_;
    int line_;
    int column_;
};

}  // namespace qcm
