#pragma once

#include <stdexcept>

namespace rrhte {

// Invalid caller input: maps to CLI exit code 1.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateInputError : ValidationError {
    using ValidationError::ValidationError;
};
struct PositivityError : ValidationError {
    using ValidationError::ValidationError;
};
struct UndefinedRateError : ValidationError {
    using ValidationError::ValidationError;
};
// Single-arm data and similar unestimable requests.
struct EstimationError : ValidationError {
    using ValidationError::ValidationError;
};

// Runtime failures: maps to CLI exit code 2.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rrhte
