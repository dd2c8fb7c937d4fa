#pragma once

#include <stdexcept>
#include <string>

namespace lqriter {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix dimensions incompatible with the requested operation.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A linear solve hit a pivot below threshold, or an operator that must be
/// inverted (R + BᵀPB, the vectorized Lyapunov operator) is singular.
class SingularError : public Error {
public:
    explicit SingularError(const std::string& what) : Error(what) {}
};

/// An iterative routine exhausted its iteration budget.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

/// Policy evaluation was asked to evaluate a gain whose closed loop is not
/// Schur stable; the Lyapunov cost is unbounded.
class UnstablePolicyError : public Error {
public:
    explicit UnstablePolicyError(const std::string& what) : Error(what) {}
};

/// An argument violates a documented precondition.
class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& what) : Error(what) {}
};

} // namespace lqriter
