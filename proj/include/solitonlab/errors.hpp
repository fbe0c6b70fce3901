#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace solitonlab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point or path left the chart domain (or too close to the boundary for
// finite differencing).
struct DomainError : Error {
    using Error::Error;
};

// Metric failed the symmetric positive definite check at an evaluation point.
struct DegenerateMetricError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// Config file / expression / CLI usage problems. Messages carry line numbers
// or token names where available.
struct ConfigError : Error {
    using Error::Error;
};

// An operation was invoked without its stated precondition (refusal).
struct PreconditionError : Error {
    using Error::Error;
};

// Step-size underflow or a failed numerical verification. Carries the last
// good parameter value when it comes from an integrator.
struct NumericalError : Error {
    double last_param = 0.0;
    std::vector<double> last_state;
    explicit NumericalError(const std::string& msg) : Error(msg) {}
    NumericalError(const std::string& msg, double t, std::vector<double> y)
        : Error(msg), last_param(t), last_state(std::move(y)) {}
};

// Partial result: a trajectory reached the domain boundary at exit_param.
struct DomainExitError : Error {
    double exit_param;
    std::vector<double> exit_state;
    DomainExitError(const std::string& msg, double t, std::vector<double> y)
        : Error(msg), exit_param(t), exit_state(std::move(y)) {}
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct DegenerateInputError : Error {
    using Error::Error;
};

// Parameter-space Jacobian lost rank.
struct ImmersionError : Error {
    using Error::Error;
};

// Rotational profile hit the symmetry axis with nonzero slope.
struct CoordinateSingularityError : Error {
    using Error::Error;
};

} // namespace solitonlab
