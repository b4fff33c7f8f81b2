// meanfield.hpp — displaced-frame stationarity conditions and phase classification

#pragma once

#include <utility>

#include "dicke/params.hpp"

namespace dicke {

enum class Phase { Normal, Superradiant };

/// Order parameters per sqrt(N): full displacements are alpha = i sqrt(N) alpha0,
/// beta = sqrt(N) beta0. beta0 >= 0 by convention; the Z2 partner (-alpha0, -beta0)
/// is physically equivalent and not returned.
struct MeanFieldSolution {
    double alpha0{};
    double beta0{};
    Phase phase{Phase::Normal};
    double residual_a{};   // stationarity residual of the photon equation, omega_R units
    double residual_b{};   // stationarity residual of the atomic equation, omega_R units
};

/// y_crit = sqrt(-delta_C * omega_R). Throws RegimeError if delta_C >= 0.
double critical_coupling(const ReducedParams& r);

/// Solves the stationarity conditions. Normal solution for y <= y_crit
/// (including exactly at threshold); otherwise the closed-form superradiant
/// branch continuous with beta0^2(y_crit) = 0, evaluated in the
/// cancellation-free form beta0^2 = C / (1 + sqrt(1 - A C)) of the quadratic
/// A x^2 - 2x + C = 0, A = u/delta_C, C = (y^2 - y_crit^2)/(y^2 + u omega_R).
MeanFieldSolution solve_displacements(const ReducedParams& r);

/// Residuals of both stationarity equations for an arbitrary candidate solution,
/// in omega_R units. Throws SingularError at beta0^2 = 1.
std::pair<double, double> meanfield_residuals(const ReducedParams& r, const MeanFieldSolution& s);

} // namespace dicke
