#pragma once

#include <stdexcept>
#include <string>

namespace fou {

/// Parameter outside the admissible range of a process, kernel or operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Evaluation at a point where the formula is singular (diagonal of a mixed
/// partial, zero lag of a singular kernel).
class SingularityError : public std::domain_error {
public:
    explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// Numerical failure: quadrature that did not converge where convergence is
/// required, covariance that could not be factorized.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fou
