#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace beamlab {

// Invalid input: bad config fields, violated preconditions. CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: solver breakdown, singular shift, nonconvergence. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Resolvent shift landed on (or numerically indistinguishable from) an eigenvalue.
class PoleError : public NumericalError {
public:
    PoleError(const std::string& msg, double lambda,
              std::optional<std::complex<double>> nearest)
        : NumericalError(msg), lambda(lambda), nearest_eigenvalue(nearest) {}

    double lambda;
    std::optional<std::complex<double>> nearest_eigenvalue;
};

}  // namespace beamlab
