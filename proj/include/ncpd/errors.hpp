#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ncpd {

// Raised when a configuration or argument violates a documented invariant.
// Carries the offending field name so front ends can point at it.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Base class for runtime numeric failures (non-PD matrices, failed
// factorizations). Maps to exit code 4 in the CLI.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training data produce an unusable covariance estimate (rank deficient or
// condition number beyond the guard).
class DegenerateTrainingError : public NumericError {
public:
    using NumericError::NumericError;
};

// A closed-form update hit a geometric degeneracy (e.g. estimated jammer
// signature parallel to the target steering vector).
class DegenerateGeometryError : public NumericError {
public:
    using NumericError::NumericError;
};

// Linear system of an iterative update is singular (all fitted amplitudes
// zero); callers may treat this as convergence.
class SingularUpdateError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace ncpd
