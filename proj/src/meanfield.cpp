#include "dicke/meanfield.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

namespace dicke {

double critical_coupling(const ReducedParams& r) {
    if (!(r.delta_C < 0.0)) {
        throw RegimeError("regime violation: delta_C must be negative");
    }
    if (!(r.omega_R > 0.0)) {
        throw RegimeError("regime violation: omega_R must be positive");
    }
    return std::sqrt(-r.delta_C * r.omega_R);
}

namespace {

// Residuals of the two stationarity equations in omega_R = 1 units:
//   (delta_C - u b0^2) a0 - y b0 sqrt(1-b0^2)                     (photon)
//   (omega_R + u a0^2) b0 + y a0 (1-2b0^2)/sqrt(1-b0^2)           (atomic)
std::pair<double, double> residuals_normalized(const ReducedParams& n, double a0, double b0) {
    const double b2 = b0 * b0;
    const double root = std::sqrt(1.0 - b2);
    const double ra = (n.delta_C - n.u * b2) * a0 - n.y * b0 * root;
    const double rb = (1.0 + n.u * a0 * a0) * b0 + n.y * a0 * (1.0 - 2.0 * b2) / root;
    return {ra, rb};
}

} // namespace

MeanFieldSolution solve_displacements(const ReducedParams& r) {
    check_reduced(r);
    const ReducedParams n = r.normalized();
    const double yc2 = -n.delta_C;          // y_crit^2 in omega_R = 1 units
    MeanFieldSolution s;

    if (n.y * n.y <= yc2) {
        s.phase = Phase::Normal;
        return s;                            // alpha0 = beta0 = 0, residuals 0
    }

    // Superradiant branch of A x^2 - 2x + C = 0, A = u/delta_C,
    // C = (y^2 - y_crit^2)/(y^2 + u): the root continuous with x(y_crit) = 0,
    // written as x = C/(1 + sqrt(1 - A C)) which is exact at u = 0.
    const double denominator = n.y * n.y + n.u;
    if (!(denominator > 0.0)) {
        throw RegimeError("regime violation: y^2 + u*omega_R must be positive above threshold");
    }
    const double C = (n.y * n.y - yc2) / denominator;
    const double AC = (n.u / n.delta_C) * C;
    const double disc = 1.0 - AC;
    if (!(disc >= 0.0)) {
        std::ostringstream msg;
        msg << "regime violation: negative discriminant " << disc
            << " in the superradiant branch (u/delta_C too large)";
        throw RegimeError(msg.str());
    }
    const double b2 = C / (1.0 + std::sqrt(disc));
    if (!(b2 > 0.0 && b2 <= 1.0)) {
        std::ostringstream msg;
        msg << "internal consistency: beta0^2 = " << b2 << " outside (0, 1]";
        throw NumericalError(msg.str());
    }
    if (b2 == 1.0) {
        throw SingularError("beta0^2 = 1: displaced frame is singular (fully transferred condensate)");
    }

    s.phase = Phase::Superradiant;
    s.beta0 = std::sqrt(b2);
    s.alpha0 = n.y * s.beta0 * std::sqrt(1.0 - b2) / (n.delta_C - n.u * b2);
    std::tie(s.residual_a, s.residual_b) = residuals_normalized(n, s.alpha0, s.beta0);
    return s;
}

std::pair<double, double> meanfield_residuals(const ReducedParams& r, const MeanFieldSolution& s) {
    const double b2 = s.beta0 * s.beta0;
    if (b2 >= 1.0) {
        throw SingularError("beta0^2 = 1: stationarity equations contain 1/sqrt(1-beta0^2)");
    }
    return residuals_normalized(r.normalized(), s.alpha0, s.beta0);
}

} // namespace dicke
