#pragma once

#include <stdexcept>
#include <string>

namespace dnflow {

// Argument outside a tabulated or admissible range.
struct RangeError : std::out_of_range {
    explicit RangeError(const std::string& msg) : std::out_of_range(msg) {}
};

// Quadrature non-convergence, NaN in an integrand, and the like.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A structural hypothesis fails (non-monotone characteristic function, ...).
struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Contradictory or out-of-contract problem parameters.
struct InvalidSpec : std::invalid_argument {
    explicit InvalidSpec(const std::string& msg) : std::invalid_argument(msg) {}
};

// Time stepper failure (dt underflow, positivity loss beyond rounding).
struct SchemeError : std::runtime_error {
    explicit SchemeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dnflow
