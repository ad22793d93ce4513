#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cgid {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed graph: unknown node, cycle, self-loop, duplicate edge.
class GraphError : public Error {
public:
    using Error::Error;
};

/// Arguments violate an operation's precondition (overlapping sets, etc).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A configured size or state-space limit would be exceeded.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Numeric evaluation failed: non-positive table, scope mismatch, zero mass.
class EvalError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace cgid
