#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace maxent {

// Input data fails a structural contract (shape, hermiticity, trace, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operands disagree on dimension or length.
class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// An eigensolver or other numerical backend did not converge.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller violated an operation precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// The requested quantity needs finite multipliers, which a boundary-limit
// solution does not provide.
class IdentityUnavailableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The sphere minimization did not settle within its iteration budget.
class IndeterminateVerdictError : public std::runtime_error {
public:
    IndeterminateVerdictError(const std::string& what, double margin)
        : std::runtime_error(what), best_margin(margin) {}

    double best_margin;
};

// Newton pushed ||lambda|| past the trust cap; the moment data is likely on
// the boundary of the moment body and should be re-classified.
class BoundarySuspectedError : public std::runtime_error {
public:
    BoundarySuspectedError(const std::string& what, Eigen::VectorXd lambda)
        : std::runtime_error(what), last_lambda(std::move(lambda)) {}

    Eigen::VectorXd last_lambda;
};

// Newton exhausted its iteration budget; carries the best iterate found.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, Eigen::VectorXd lambda, double residual)
        : std::runtime_error(what), best_lambda(std::move(lambda)), best_residual(residual) {}

    Eigen::VectorXd best_lambda;
    double best_residual;
};

// The target moments lie outside the moment body; carries a violating
// direction lambda*.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, Eigen::VectorXd direction)
        : std::runtime_error(what), witness(std::move(direction)) {}

    Eigen::VectorXd witness;
};

}  // namespace maxent
