#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace speckit {

// Root of every structured failure raised by the library. The CLI maps
// subclasses onto exit codes, so new error kinds should derive from the
// closest existing category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// exp/log/geometric/pow of a series with a nonzero constant term.
class NonzeroConstantTerm : public Error {
public:
    using Error::Error;
};

class DivergentSubstitution : public Error {
public:
    using Error::Error;
};

class OddExponent : public Error {
public:
    using Error::Error;
};

// Coefficient requested outside the window a series is known in.
class OutOfTruncation : public Error {
public:
    using Error::Error;
};

class AdmissibilityError : public Error {
public:
    using Error::Error;
};

// Enumeration size above the configured oracle limit.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class CapTooSmall : public Error {
public:
    using Error::Error;
};

// Misuse of an API: unknown variable, malformed caps, bad argument.
class UsageError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, std::vector<std::string> expected, const std::string &found);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::vector<std::string> &expected() const noexcept { return expected_; }

private:
    int line_;
    int column_;
    std::vector<std::string> expected_;
};

class UnknownName : public Error {
public:
    using Error::Error;
};

class TypeMismatch : public Error {
public:
    using Error::Error;
};

} // namespace speckit
