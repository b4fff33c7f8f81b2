// params.hpp — parameter records, physical -> reduced mapping, regime validation
//
// All frequencies are angular frequencies with hbar = 1. Internally every
// computation runs in omega_R = 1 units; ReducedParams::normalized() performs
// the rescaling and callers convert back at I/O boundaries.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dicke/errors.hpp"

namespace dicke {

/// Laboratory-level inputs of the transversally pumped BEC-cavity system.
struct PhysicalInputs {
    double atom_pump_detuning{};            // Delta_A, must be < 0 (red detuning)
    double cavity_pump_detuning{};          // Delta_C
    double single_photon_rabi{};            // g_0
    double pump_rabi{};                     // Omega
    long long atom_number{};                // N >= 1
    std::optional<double> recoil{};         // omega_R, or derived from mass/wavenumber
    std::optional<double> mass{};           // m (with wavenumber k: omega_R = k^2 / 2m)
    std::optional<double> wavenumber{};     // k
    double photon_loss{};                   // kappa >= 0
};

/// Reduced two-mode model parameters. The single source of truth for all
/// downstream computations; N is carried only for the finite-size oracle.
struct ReducedParams {
    double omega_R{1.0};                    // recoil frequency, > 0
    double delta_C{};                       // effective cavity detuning, < 0
    double u{};                             // light-shift coupling, |u| < |delta_C|
    double y{};                             // pump coupling, >= 0
    double kappa{};                         // photon loss rate, >= 0
    std::optional<long long> atom_number{}; // oracle only, never read by thermodynamic-limit code

    /// Same parameters expressed in omega_R = 1 units.
    ReducedParams normalized() const;
};

/// Throws RegimeError naming the violated inequality if r is outside the model regime.
void check_reduced(const ReducedParams& r);

/// Physical -> reduced mapping:
///   U_0 = g_0^2/Delta_A, eta_t = Omega g_0/Delta_A, u = N U_0/4,
///   y = |sqrt(2N) eta_t| (non-negative gauge), delta_C = Delta_C - 2u.
/// Throws RegimeError on regime violations.
ReducedParams reduce_parameters(const PhysicalInputs& p);

enum class RegimeWarning {
    TwoModeTruncation,     // |u| >= |delta_C|
    CoarseGrainWindow,     // |delta_C| not >> omega_R
    AdiabaticElimination,  // kappa >= |delta_C|
};

struct Warning {
    RegimeWarning code;
    std::string message;
};

/// Non-fatal validity checks; empty vector means no concerns.
std::vector<Warning> validate_regime(const ReducedParams& r);

} // namespace dicke
