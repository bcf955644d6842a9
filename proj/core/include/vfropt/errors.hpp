#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vfropt {

// Base class for all errors raised by this library. Data and usage problems
// are reported through exceptions; completeness validation is the one
// exception (it collects and returns its findings, see measurements.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data. Carries the 1-based line number for line-oriented
// formats (0 when the input has no meaningful line structure).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                         : message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace vfropt
