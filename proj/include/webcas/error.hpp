#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace webcas {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (Turtle, IRIs, config files). Positions are 1-based;
/// zero means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
        : Error(line == 0 ? message
                          : message + " (line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ")"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Operation refused because the caller lacks the right (ownership, grant).
class PermissionError : public Error {
public:
    using Error::Error;
};

class CryptoError : public Error {
public:
    using Error::Error;
};

}  // namespace webcas
