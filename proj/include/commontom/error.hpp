#pragma once

#include <stdexcept>
#include <string>

namespace ctom {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    Validation,
    NotFound,
    Io,
    Network,
    Auth,
};

// All library failures are reported as ctom::Error; the C API maps kind()
// onto its status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Parse failure carrying the 1-based input line it was found on (0 when the
// error concerns the corpus as a whole).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::Parse,
                line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ctom
