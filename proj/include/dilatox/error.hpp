#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dilatox {

/// Argument outside the mathematical domain of an operation (kappa >= 1, R <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a documented precondition that is not a domain restriction.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical procedure could not reach its tolerance or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double best_estimate, double error_estimate)
        : NumericalError(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// Orbit left the divergence guard or became non-finite.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : NumericalError(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace dilatox
