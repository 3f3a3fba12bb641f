#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in formula text, with a 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Raised when an enumeration or second-order quantifier would exceed the configured limits.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// An operation was called on input outside its domain (wrong arities, missing constant, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace mcf
