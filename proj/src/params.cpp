#include "dicke/params.hpp"

#include <cmath>
#include <sstream>

namespace dicke {

ReducedParams ReducedParams::normalized() const {
    ReducedParams n = *this;
    n.omega_R = 1.0;
    n.delta_C = delta_C / omega_R;
    n.u = u / omega_R;
    n.y = y / omega_R;
    n.kappa = kappa / omega_R;
    return n;
}

void check_reduced(const ReducedParams& r) {
    if (!(r.omega_R > 0.0)) {
        throw RegimeError("regime violation: omega_R must be positive");
    }
    if (!(r.delta_C < 0.0)) {
        throw RegimeError("regime violation: delta_C must be negative");
    }
    if (!(std::abs(r.u) < std::abs(r.delta_C))) {
        throw RegimeError("regime violation: |u| must be smaller than |delta_C|");
    }
    if (!(r.y >= 0.0)) {
        throw RegimeError("regime violation: y must be non-negative");
    }
    if (!(r.kappa >= 0.0)) {
        throw RegimeError("regime violation: kappa must be non-negative");
    }
    if (r.atom_number && *r.atom_number < 1) {
        throw RegimeError("regime violation: atom number N must be >= 1");
    }
}

namespace {

double resolve_recoil(const PhysicalInputs& p) {
    std::optional<double> from_mk;
    if (p.mass && p.wavenumber) {
        if (!(*p.mass > 0.0)) throw RegimeError("regime violation: mass must be positive");
        from_mk = (*p.wavenumber) * (*p.wavenumber) / (2.0 * *p.mass);
    } else if (p.mass || p.wavenumber) {
        throw ConfigError("recoil frequency: mass and wavenumber must be given together");
    }
    if (p.recoil && from_mk) {
        double rel = std::abs(*p.recoil - *from_mk) / std::max(std::abs(*p.recoil), 1e-300);
        if (rel > 1e-12) {
            throw ConfigError("recoil frequency: explicit omega_R disagrees with k^2/2m");
        }
        return *p.recoil;
    }
    if (p.recoil) return *p.recoil;
    if (from_mk) return *from_mk;
    throw ConfigError("recoil frequency: provide omega_R or mass and wavenumber");
}

} // namespace

ReducedParams reduce_parameters(const PhysicalInputs& p) {
    if (!(p.atom_pump_detuning < 0.0)) {
        throw RegimeError("regime violation: Delta_A must be negative (red detuning)");
    }
    if (p.atom_number < 1) {
        throw RegimeError("regime violation: atom number N must be >= 1");
    }
    if (!(p.photon_loss >= 0.0)) {
        throw RegimeError("regime violation: kappa must be non-negative");
    }
    const double omega_R = resolve_recoil(p);
    if (!(omega_R > 0.0)) {
        throw RegimeError("regime violation: omega_R must be positive");
    }

    const double N = static_cast<double>(p.atom_number);
    const double U0 = p.single_photon_rabi * p.single_photon_rabi / p.atom_pump_detuning;
    const double eta_t = p.pump_rabi * p.single_photon_rabi / p.atom_pump_detuning;

    ReducedParams r;
    r.omega_R = omega_R;
    r.u = N * U0 / 4.0;
    // The sign of y is a gauge (b -> -b); store the non-negative representative.
    r.y = std::abs(std::sqrt(2.0 * N) * eta_t);
    r.delta_C = p.cavity_pump_detuning - 2.0 * r.u;
    r.kappa = p.photon_loss;
    r.atom_number = p.atom_number;

    check_reduced(r);
    return r;
}

std::vector<Warning> validate_regime(const ReducedParams& r) {
    std::vector<Warning> warnings;
    std::ostringstream msg;
    if (std::abs(r.u) >= std::abs(r.delta_C)) {
        msg << "|u| = " << std::abs(r.u) << " >= |delta_C| = " << std::abs(r.delta_C)
            << ": the two-mode truncation is not justified";
        warnings.push_back({RegimeWarning::TwoModeTruncation, msg.str()});
        msg.str({});
    }
    if (std::abs(r.delta_C) < 10.0 * r.omega_R) {
        msg << "|delta_C| = " << std::abs(r.delta_C) << " is not >> omega_R = " << r.omega_R
            << ": no valid coarse-graining window for the population diffusion rate";
        warnings.push_back({RegimeWarning::CoarseGrainWindow, msg.str()});
        msg.str({});
    }
    if (r.kappa >= std::abs(r.delta_C)) {
        msg << "kappa = " << r.kappa << " >= |delta_C| = " << std::abs(r.delta_C)
            << ": adiabatic elimination of the photon field is questionable";
        warnings.push_back({RegimeWarning::AdiabaticElimination, msg.str()});
    }
    return warnings;
}

} // namespace dicke
