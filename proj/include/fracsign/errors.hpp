#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsign {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of an operation
// (gamma at a pole, ln of a nonpositive number, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Result not representable in double precision.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

// An iterative scheme exhausted its budget before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, int levels_used, double last_residual)
        : Error(what), levels(levels_used), last_term(last_residual) {}

    int levels;
    double last_term;
};

// Parse failure; offset is the byte position in the source string.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t at)
        : Error(what + " (at offset " + std::to_string(at) + ")"), offset(at) {}

    std::size_t offset;
};

// Problem description (JSON or programmatic) violates its schema.
class SpecError : public Error {
public:
    explicit SpecError(const std::string& what) : Error(what) {}
};

} // namespace fracsign
