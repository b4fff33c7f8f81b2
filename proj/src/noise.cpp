#include "dicke/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dicke {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCriticalTol = 1e-8;   // matches mode_decomposition's guard
constexpr double kImagTol = 1e-10;

double checked_real(std::complex<double> z, const char* what) {
    if (std::abs(z.imag()) > kImagTol * std::max(1.0, std::abs(z.real()))) {
        std::ostringstream msg;
        msg << what << ": imaginary residue " << z.imag() << " exceeds tolerance";
        throw NumericalError(msg.str());
    }
    return z.real();
}

bool theta_passes(double inv_dt, double pair_frequency) {
    return inv_dt - std::abs(pair_frequency) > 0.0;  // open cutoff: 0 at exact equality
}

} // namespace

double default_coarse_grain_dt(const ReducedParams& r) {
    return 1.0 / std::sqrt(std::abs(r.delta_C) * r.omega_R);
}

double rate_normal_modes(const ModeDecomposition& m, double kappa) {
    if (!(kappa >= 0.0)) throw ConfigError("rate_normal_modes: kappa must be non-negative");
    double rate = 0.0;
    for (const Mode& mode : m.modes) {
        if (mode.kind == ModeKind::Annihilation) {
            rate += std::norm(mode.left[1]);
        }
    }
    return 2.0 * kappa * rate;
}

double rate_populations(const ModeDecomposition& m, double kappa, double delta_t) {
    if (!(delta_t > 0.0)) throw ConfigError("rate_populations: delta_t must be positive");
    if (!(kappa >= 0.0)) throw ConfigError("rate_populations: kappa must be non-negative");
    const double inv = 1.0 / delta_t;
    std::complex<double> total = 0.0;
    for (const Mode& mk : m.modes) {
        for (const Mode& ml : m.modes) {
            if (!theta_passes(inv, mk.frequency + ml.frequency)) continue;
            total += std::conj(mk.left[0]) * std::conj(ml.left[1]) *
                     (mk.right[1] * ml.right[0] + mk.right[3] * ml.right[2]);
        }
    }
    return 2.0 * kappa * checked_real(total, "rate_populations");
}

double critical_rate_populations(const QuadraticCoeffs& q, double kappa, double delta_t) {
    if (!(delta_t > 0.0)) throw ConfigError("critical_rate_populations: delta_t must be positive");
    if (!(kappa >= 0.0)) throw ConfigError("critical_rate_populations: kappa must be non-negative");
    const double inv = 1.0 / delta_t;

    // Plus-family eigenvectors stay regular as omega_- -> 0; the minus-family
    // blocks of the double sum (which all pass the Theta cutoff in this limit)
    // collapse to entries of the complementary projector P- = I - P+.
    const auto plus = mode_family(q, ModeFamily::Plus);
    Eigen::Matrix4cd pminus = Eigen::Matrix4cd::Identity();
    for (const Mode& mode : plus) {
        pminus -= mode.right * mode.left.adjoint();
    }

    std::complex<double> total = pminus(1, 0) * pminus(0, 1) + pminus(3, 0) * pminus(2, 1);
    for (const Mode& mk : plus) {
        if (theta_passes(inv, mk.frequency)) {  // cross pairs carry |w_k + 0|
            total += std::conj(mk.left[0]) * (mk.right[1] * pminus(0, 1) + mk.right[3] * pminus(2, 1));
            total += (pminus(1, 0) * mk.right[0] + pminus(3, 0) * mk.right[2]) * std::conj(mk.left[1]);
        }
    }
    for (const Mode& mk : plus) {
        for (const Mode& ml : plus) {
            if (!theta_passes(inv, mk.frequency + ml.frequency)) continue;
            total += std::conj(mk.left[0]) * std::conj(ml.left[1]) *
                     (mk.right[1] * ml.right[0] + mk.right[3] * ml.right[2]);
        }
    }
    return 2.0 * kappa * checked_real(total, "critical_rate_populations");
}

double rate_adiabatic(const QuadraticCoeffs& q, const ReducedParams& r) {
    return r.kappa * q.mc * q.mc / (r.delta_C * r.delta_C + r.kappa * r.kappa);
}

DiffusionRates diffusion_rates(const QuadraticCoeffs& q, const ReducedParams& r, double kappa,
                               std::optional<double> delta_t) {
    DiffusionRates out;
    out.delta_t = delta_t.value_or(default_coarse_grain_dt(r));
    out.rate_adiabatic = rate_adiabatic(q, r);

    const NormalModeSpectrum spec = eigenfrequencies(q);
    if (!spec.stable) {
        throw NumericalError("diffusion_rates: unstable spectrum");
    }
    if (spec.omega_minus < kCriticalTol * frequency_unit(q)) {
        out.rate_modes = kNaN;  // diverges at the critical point
        out.rate_populations = critical_rate_populations(q, kappa, out.delta_t);
        return out;
    }
    const ModeDecomposition m = mode_decomposition(q);
    out.rate_modes = rate_normal_modes(m, kappa);
    out.rate_populations = rate_populations(m, kappa, out.delta_t);
    return out;
}

// ---------------------------------------------------------------------------
// Second-moment evolution dC/dt = M C + C M^T + N, C_ij = <R_i R_j>, from the
// normal-mode vacuum. Cash-Karp embedded Runge-Kutta, fixed step per interval.
// ---------------------------------------------------------------------------

namespace {

// Ground-state second moments: <rho_an rho_an'> = 1 only, so C0 = sum r_an (r_an')^T.
Eigen::Matrix4cd ground_covariance(const ModeDecomposition& m) {
    Eigen::Matrix4cd C = Eigen::Matrix4cd::Zero();
    for (int fam = 0; fam < 2; ++fam) {
        C += m.modes[2 * fam].right * m.modes[2 * fam + 1].right.transpose();
    }
    return C;
}

template <typename Sampler>
std::vector<double> evolve_second_moments(const ModeDecomposition& m, double kappa,
                                          std::span<const double> t_grid, Sampler&& sample) {
    if (!(kappa >= 0.0)) throw ConfigError("covariance evolution: kappa must be non-negative");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] >= t_grid[i - 1]))) {
            throw ConfigError("covariance evolution: t_grid must be sorted and non-negative");
        }
    }
    std::vector<double> result;
    result.reserve(t_grid.size());
    if (t_grid.empty()) return result;

    Eigen::Matrix4cd noise = Eigen::Matrix4cd::Zero();
    noise(0, 1) = 2.0 * kappa;
    Eigen::Matrix4cd C = ground_covariance(m);
    const double base = sample(C);

    double omega_scale = 0.0;
    for (const Mode& mode : m.modes) omega_scale = std::max(omega_scale, std::abs(mode.frequency));
    const double hmax = 0.02 / std::max(omega_scale, 1e-300);

    const auto f = [&](const Eigen::Matrix4cd& X) -> Eigen::Matrix4cd {
        return m.drift * X + X * m.drift.transpose() + noise;
    };

    double t = 0.0;
    for (double target : t_grid) {
        const double interval = target - t;
        if (interval > 0.0) {
            const int nsteps = std::max(1, static_cast<int>(std::ceil(interval / hmax)));
            const double h = interval / nsteps;
            for (int s = 0; s < nsteps; ++s) {
                const Eigen::Matrix4cd k1 = f(C);
                const Eigen::Matrix4cd k2 = f(C + h * (0.2 * k1));
                const Eigen::Matrix4cd k3 = f(C + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
                const Eigen::Matrix4cd k4 =
                    f(C + h * (0.3 * k1 - 0.9 * k2 + 1.2 * k3));
                const Eigen::Matrix4cd k5 =
                    f(C + h * (-11.0 / 54.0 * k1 + 2.5 * k2 - 70.0 / 27.0 * k3 + 35.0 / 27.0 * k4));
                const Eigen::Matrix4cd k6 =
                    f(C + h * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 + 575.0 / 13824.0 * k3 +
                               44275.0 / 110592.0 * k4 + 253.0 / 4096.0 * k5));
                const Eigen::Matrix4cd c5 =
                    C + h * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4 +
                             512.0 / 1771.0 * k6);
                const Eigen::Matrix4cd c4 =
                    C + h * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                             13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 + 0.25 * k6);
                const double err = (c5 - c4).cwiseAbs().maxCoeff();
                const double tol = 1e-9 * std::max(1.0, c5.cwiseAbs().maxCoeff());
                if (err > tol) {
                    std::ostringstream msg;
                    msg << "covariance evolution: step-size failure at t = " << t << ", h = " << h
                        << ", embedded error " << err << " > " << tol;
                    throw NumericalError(msg.str());
                }
                C = c5;
                t += h;
            }
            t = target;  // absorb accumulated rounding
        }
        result.push_back(sample(C) - base);
    }
    return result;
}

} // namespace

std::vector<double> covariance_evolution(const ModeDecomposition& m, double kappa,
                                         std::span<const double> t_grid) {
    return evolve_second_moments(m, kappa, t_grid, [](const Eigen::Matrix4cd& C) {
        return (C(1, 0) + C(3, 2)).real();
    });
}

std::vector<double> mode_population_evolution(const ModeDecomposition& m, double kappa,
                                              std::span<const double> t_grid) {
    // <rho_k' rho_k> = sum_ij conj(l_cr_i) C_ij conj(l_an_j), summed over families
    return evolve_second_moments(m, kappa, t_grid, [&m](const Eigen::Matrix4cd& C) {
        std::complex<double> total = 0.0;
        for (int fam = 0; fam < 2; ++fam) {
            const Mode& an = m.modes[2 * fam];
            const Mode& cr = m.modes[2 * fam + 1];
            total += cr.left.dot(C * an.left.conjugate());
        }
        return total.real();
    });
}

std::vector<double> cut_pair_frequencies(const ModeDecomposition& m, double delta_t) {
    if (!(delta_t > 0.0)) throw ConfigError("cut_pair_frequencies: delta_t must be positive");
    const double inv = 1.0 / delta_t;
    std::vector<double> cuts;
    for (const Mode& mk : m.modes) {
        for (const Mode& ml : m.modes) {
            const double w = std::abs(mk.frequency + ml.frequency);
            if (theta_passes(inv, w)) continue;
            bool seen = false;
            for (double c : cuts) {
                if (std::abs(c - w) <= 1e-9 * std::max(c, w)) { seen = true; break; }
            }
            if (!seen) cuts.push_back(w);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

double secular_slope(std::span<const double> t, std::span<const double> values, double t0,
                     double t1, std::span<const double> detrend_frequencies) {
    if (t.size() != values.size()) {
        throw ConfigError("secular_slope: mismatched sample arrays");
    }
    std::vector<int> idx;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t0 && t[i] <= t1) idx.push_back(static_cast<int>(i));
    }
    const int cols = 2 + 2 * static_cast<int>(detrend_frequencies.size());
    if (static_cast<int>(idx.size()) < cols) {
        throw ConfigError("secular_slope: not enough samples in the fit window");
    }
    Eigen::MatrixXd A(idx.size(), cols);
    Eigen::VectorXd b(idx.size());
    for (std::size_t row = 0; row < idx.size(); ++row) {
        const double ti = t[idx[row]];
        A(row, 0) = 1.0;
        A(row, 1) = ti;
        for (std::size_t fi = 0; fi < detrend_frequencies.size(); ++fi) {
            A(row, 2 + 2 * fi) = std::cos(detrend_frequencies[fi] * ti);
            A(row, 3 + 2 * fi) = std::sin(detrend_frequencies[fi] * ti);
        }
        b(row) = values[idx[row]];
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    return x(1);
}

} // namespace dicke
