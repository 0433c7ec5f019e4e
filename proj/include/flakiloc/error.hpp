#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flakiloc {

// Base of every error raised by the engine. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A history had no usable (non-skip) execution where one was required.
class EmptyHistoryError : public Error {
public:
    using Error::Error;
};

// classify_category() on a test that is stable in both order modes.
class NotFlakyError : public Error {
public:
    using Error::Error;
};

class NotInUniverseError : public Error {
public:
    using Error::Error;
};

// Violated precondition on a value: negative division input, rank > N,
// empty sample, bad generator config, mismatched test sets, ...
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed input file. line() is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace flakiloc
