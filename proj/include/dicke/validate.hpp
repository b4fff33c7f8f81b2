// validate.hpp — programmatic invariant suite backing the `validate` subcommand

#pragma once

#include <string>
#include <vector>

namespace dicke {

struct CheckResult {
    std::string name;
    bool passed{};
    std::string detail;
};

/// Runs the cross-module invariant battery (parameter covariance, mean-field
/// residuals and branch consistency, spectrum/decomposition identities,
/// population dual-route agreement, diffusion-rate properties, small-N oracle
/// checks). Deterministic; a failed check carries a diagnostic string.
std::vector<CheckResult> run_validation_suite();

} // namespace dicke
