// errors.hpp: exception types shared by the pfwcl modules.
//
// ConfigError and AssumptionError mean the input is unusable (CLI exit 2);
// NumericalError means a quadrature, eigensolver or linear solve failed to
// reach its target (CLI exit 3).

#pragma once

#include <stdexcept>
#include <string>

namespace pfwcl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The form factor violates the standing square-integrability conditions.
struct AssumptionError : ConfigError {
    using ConfigError::ConfigError;
};

struct NumericalError : std::runtime_error {
    NumericalError(std::string operation, const std::string& what, double residual = 0.0)
        : std::runtime_error(operation + ": " + what), operation_(std::move(operation)), residual_(residual) {}

    const std::string& operation() const noexcept { return operation_; }
    double residual() const noexcept { return residual_; }

private:
    std::string operation_;
    double residual_;
};

}  // namespace pfwcl
