#pragma once

#include <stdexcept>
#include <string>

namespace mertens {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can map the category onto an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad argument, wrong order).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// The request would need more memory than the configured budget.
class ResourceLimitError : public Error {
public:
    using Error::Error;
};

// Malformed textual or binary input. `line` is 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Numeric request outside the range where a method is known to be exact or
// accurate: log-prime sieve above 10^27, phase rebasing beyond the digits
// carried by a table, explicit-formula evaluation outside the float envelope.
class PrecisionError : public Error {
public:
    using Error::Error;
};

// Search produced no result (e.g. no quasiperiod within the multiplier bound).
class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace mertens
