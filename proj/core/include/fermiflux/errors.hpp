#pragma once

#include <stdexcept>
#include <string>

namespace fermiflux {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCategory : int {
    validation = 2,
    numeric = 3,
    invariant = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

/// Bad arguments to an operation (non-finite values, empty lists, size mismatches).
class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& message)
        : Error(ErrorCategory::validation, message) {}
};

/// Scenario / configuration file problems, with file:line context where known.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorCategory::validation, message) {}
};

/// State outside the degenerate-gas validity domain (x = mu/T below x_min).
class SommerfeldDomainError : public Error {
public:
    explicit SommerfeldDomainError(const std::string& message)
        : Error(ErrorCategory::validation, message) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& message)
        : Error(ErrorCategory::numeric, message) {}
};

/// Quadrature failed to reach its accuracy target.
class QuadratureError : public NumericError {
public:
    explicit QuadratureError(const std::string& message) : NumericError(message) {}
};

/// The 2x2 extensive-variable Jacobian lost invertibility.
class SingularJacobianError : public NumericError {
public:
    explicit SingularJacobianError(const std::string& message) : NumericError(message) {}
};

/// Adaptive step size collapsed; the problem is stiffer than the explicit method allows.
class StiffnessError : public NumericError {
public:
    explicit StiffnessError(const std::string& message) : NumericError(message) {}
};

/// Nonlinear solver did not converge; message carries the last iterate and residuals.
class SolverError : public NumericError {
public:
    explicit SolverError(const std::string& message) : NumericError(message) {}
};

/// A monitored physical invariant (second law, conservation) failed beyond tolerance.
class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& message)
        : Error(ErrorCategory::invariant, message) {}
};

}  // namespace fermiflux
