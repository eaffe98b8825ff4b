#pragma once

#include <ostream>
#include <stdexcept>
#include <string>

#include "dilatox/error.hpp"

namespace dilatox::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kConfigError = 2,
    kPolicyRefusal = 3,
    kNumericalFailure = 4,
};

/// Invalid or missing configuration value; the message names the field and line.
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A valid request the tool refuses without an explicit opt-in flag.
class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs the command line in-process. Diagnostics go to `err`, progress to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dilatox::cli
