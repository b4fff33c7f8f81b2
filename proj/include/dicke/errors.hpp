// errors.hpp — error hierarchy shared by all modules
//
// RegimeError / ConfigError map to CLI exit code 1 (bad input),
// everything else derived from Error maps to exit code 2 (numerical failure).

#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter set outside the validity regime of the model (delta_C >= 0, |u| >= |delta_C|, ...).
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or CLI usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Singular input, e.g. beta0^2 = 1 hitting a 1/sqrt(1-beta0^2) factor.
class SingularError : public Error {
public:
    using Error::Error;
};

/// Critical or degenerate spectrum where a biorthogonal decomposition is ill-posed.
class DegenerateModeError : public Error {
public:
    using Error::Error;
};

/// Internal numerical failure (non-convergence, instability, integration error).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds a configured resource cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

} // namespace dicke
