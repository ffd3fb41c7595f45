// errors.hpp
// Exception types shared by all modules.

#pragma once

#include <stdexcept>
#include <string>

namespace oscunruh {

// Precondition violated by the caller (bad dimension, negative rate, ...).
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A quantity that should be real or Hermitian came out otherwise.
struct NumericalInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Norm or trace drift exceeded the integration tolerance.
struct IntegrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rabi period requested for a vanishing effective coupling.
struct UndefinedPeriod : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditionedFit : std::runtime_error {
    IllConditionedFit(const std::string& what, double cond)
        : std::runtime_error(what), condition_number(cond) {}
    double condition_number;
};

}  // namespace oscunruh
