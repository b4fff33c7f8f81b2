// sweep.hpp — JSON configuration, parameter sweeps, figure presets, CSV emission

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dicke/params.hpp"

namespace dicke {

struct YGrid {
    enum class Scale { Absolute, YOverYcrit };
    double min{0.0};
    double max{2.0};
    int points{401};
    Scale scale{Scale::YOverYcrit};
};

struct OracleConfig {
    std::vector<int> atom_numbers;
    std::optional<int> photon_cutoff;  // override of the default cutoff rule
};

struct SweepConfig {
    ReducedParams base;                    // y ignored; the grid supplies it
    YGrid grid;
    double kappa{1.0};
    std::optional<double> coarse_grain_dt;
    std::optional<OracleConfig> oracle;
    std::string output;                    // empty = stdout
};

/// Parses and validates a JSON document. Unknown keys are rejected; defaults:
/// omega_R = 1, kappa = 1, grid y/y_crit in [0, 2] with 401 points.
/// Throws ConfigError / RegimeError.
SweepConfig parse_config(const std::string& json_text);

/// Presets reproducing the published parameter sets
/// (delta_C = -100 omega_R, u = -0.1 omega_R; fig2 adds kappa = omega_R).
SweepConfig fig1_config();
SweepConfig fig2_config();

/// One CSV row per grid point, column order:
///   y, y_over_ycrit, alpha0, beta0, alpha0_sq, beta0_sq, M0, Mx, My, Mc,
///   omega_plus, omega_minus, n_photon_incoh, n_atom_incoh,
///   rate_modes, rate_populations, rate_adiabatic, flags
/// Undefined entries carry the literal `nan` and the flags column names the
/// condition. Output bytes are deterministic for a fixed config (17 significant
/// digits, '\n' line endings); grid points are evaluated by an order-preserving
/// parallel map.
void run_sweep(const SweepConfig& cfg, std::ostream& out);

/// Side-by-side finite-N oracle vs thermodynamic-limit observables per (N, y).
/// Requires the oracle block; a reporting tool, large differences do not fail.
void run_oracle_compare(const SweepConfig& cfg, std::ostream& out);

} // namespace dicke
