// noise.hpp — measurement back-action depletion rates and the time-domain verifier
//
// Photon loss enters as a Langevin noise xi = [xi, xi', 0, 0] with the single
// non-vanishing correlator <xi(t) xi'(t')> = 2 kappa delta(t-t'); the
// dissipative -kappa a drift is deliberately excluded (transient regime).

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dicke/fluctuations.hpp"

namespace dicke {

struct DiffusionRates {
    double rate_modes{};        // d/dt <rho_+' rho_+ + rho_-' rho_->; NaN at the critical point
    double rate_populations{};  // coarse-grained d/dt <a'a + b'b>
    double rate_adiabatic{};    // kappa Mc^2 / (delta_C^2 + kappa^2)
    double delta_t{};           // coarse-graining step actually used
};

/// Default coarse-graining step: geometric mean 1/sqrt(|delta_C| omega_R),
/// inside the window |delta_C|^-1 << dt << omega_R^-1 whenever |delta_C| >> omega_R.
double default_coarse_grain_dt(const ReducedParams& r);

/// Linear growth coefficient of the total normal-mode population: the secular
/// (omega_k + omega_l = 0) noise terms, which reduce to
/// 2 kappa (|l2^(+)|^2 + |l2^(-)|^2) over the annihilation-like left vectors.
double rate_normal_modes(const ModeDecomposition& m, double kappa);

/// Coarse-grained population diffusion rate: the full double sum
///   2 kappa sum_{k,l} l1^(k)* l2^(l)* (r2^(k) r1^(l) + r4^(k) r3^(l)) Theta(1/dt - |w_k+w_l|)
/// with an open cutoff (Theta = 0 at exact equality). The result must be real
/// to 1e-10; the imaginary residue is checked and discarded.
double rate_populations(const ModeDecomposition& m, double kappa, double delta_t);

/// Critical-point limit of rate_populations, valid as omega_- -> 0: the
/// minus-family blocks are resummed through the spectral projector
/// P- = I - P+, with P+ built from the (regular) plus-family eigenvectors.
double critical_rate_populations(const QuadraticCoeffs& q, double kappa, double delta_t);

/// Adiabatic-elimination estimate kappa Mc^2/(delta_C^2 + kappa^2).
double rate_adiabatic(const QuadraticCoeffs& q, const ReducedParams& r);

/// All three rates with the critical point handled (rate_modes = NaN there,
/// rate_populations via the projector limit). delta_t defaults to the
/// coarse-graining rule above.
DiffusionRates diffusion_rates(const QuadraticCoeffs& q, const ReducedParams& r, double kappa,
                               std::optional<double> delta_t = std::nullopt);

/// Integrates the second-moment equations dC/dt = M C + C M^T + N_noise from
/// the normal-mode vacuum (an exact fixed point of the noiseless flow) and
/// returns delta_N(t) = <a'a + b'b>(t) - <a'a + b'b>(0) at the requested times.
/// Fixed-step embedded Runge-Kutta (Cash-Karp); throws NumericalError with
/// diagnostics when the embedded error estimate exceeds tolerance.
std::vector<double> covariance_evolution(const ModeDecomposition& m, double kappa,
                                         std::span<const double> t_grid);

/// Same second-moment evolution, contracted to the total normal-mode
/// population <rho_+' rho_+ + rho_-' rho_-> instead; grows strictly linearly
/// (all contributing pairs are secular), cross-checking rate_normal_modes.
std::vector<double> mode_population_evolution(const ModeDecomposition& m, double kappa,
                                              std::span<const double> t_grid);

/// Distinct pair frequencies |w_k + w_l| above the Theta cutoff 1/delta_t;
/// the oscillatory basis for detrended slope fits.
std::vector<double> cut_pair_frequencies(const ModeDecomposition& m, double delta_t);

/// Least-squares slope of (t, values) over [t0, t1] with the regression basis
/// {1, t} plus cos/sin at the given frequencies (harmonic detrending).
double secular_slope(std::span<const double> t, std::span<const double> values, double t0,
                     double t1, std::span<const double> detrend_frequencies);

} // namespace dicke
