#pragma once

#include <stdexcept>
#include <string>

namespace wcsense {

// Bad argument value (negative weight, nbar < 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inputs are well-formed but the requested setup is outside a guard
// (exchange order, dimension guard, oscillator cutoff).
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedVariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Internal consistency failure: negative probabilities beyond round-off,
// eigensolver non-convergence, off-diagonal reduced elements.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wcsense
