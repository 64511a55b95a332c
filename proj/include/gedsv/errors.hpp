#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gedsv {

// Bad arguments to a numerical routine are reported as std::domain_error.
// The types below cover failures that callers are expected to recover from.

/// A computation produced a non-finite or otherwise unusable value.
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The filter recursion left the finite range at observation `t` (1-based).
class FilterFailure : public NumericFailure {
public:
    FilterFailure(std::size_t t, double shape, double rate, double y);

    std::size_t t;
    double shape;
    double rate;
    double y;
};

/// An iterative method stopped before meeting its convergence test.
class ConvergenceFailure : public NumericFailure {
public:
    using NumericFailure::NumericFailure;
};

/// Malformed or unusable input data; `line` is 1-based, 0 when not tied to a line.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, std::size_t line = 0);

    std::size_t line;
};

}  // namespace gedsv
