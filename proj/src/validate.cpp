#include "dicke/validate.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "dicke/ed.hpp"
#include "dicke/fluctuations.hpp"
#include "dicke/meanfield.hpp"
#include "dicke/noise.hpp"
#include "dicke/params.hpp"

namespace dicke {

namespace {

// Deterministic platform-independent uniform draws.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {}
    double uniform(double lo, double hi) {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        const double x = static_cast<double>(state_ >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * x;
    }
private:
    std::uint64_t state_;
};

struct Suite {
    std::vector<CheckResult> results;

    void check(const std::string& name, bool ok, const std::string& detail = {}) {
        results.push_back({name, ok, detail});
    }

    template <typename F>
    void guarded(const std::string& name, F&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            results.push_back({name, false, std::string("exception: ") + e.what()});
        }
    }
};

ReducedParams fig_params(double y) {
    ReducedParams r;
    r.delta_C = -100.0;
    r.u = -0.1;
    r.y = y;
    r.kappa = 1.0;
    return r;
}

QuadraticCoeffs coeffs_at(const ReducedParams& r) {
    return quadratic_coefficients(r, solve_displacements(r));
}

// A random stable, non-critical parameter point.
ReducedParams random_stable(Lcg& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        ReducedParams r;
        r.delta_C = -rng.uniform(3.0, 300.0);
        r.u = rng.uniform(-0.8, 0.8) * std::abs(r.delta_C);
        r.kappa = rng.uniform(0.0, 2.0);
        const double yc = std::sqrt(-r.delta_C);
        r.y = rng.uniform(0.0, 1.8) * yc;
        if (std::abs(r.y - yc) < 0.05 * yc) continue;
        try {
            const auto spec = eigenfrequencies(coeffs_at(r));
            if (spec.stable && spec.omega_minus > 1e-3 &&
                spec.omega_plus - spec.omega_minus > 1e-6 * spec.omega_plus) {
                return r;
            }
        } catch (const Error&) {
        }
    }
    throw NumericalError("random_stable: could not draw a stable parameter point");
}

void check_params(Suite& s) {
    s.guarded("params.scale_covariance", [&] {
        Lcg rng(11);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            PhysicalInputs p;
            p.atom_pump_detuning = -rng.uniform(1e3, 1e7);
            p.cavity_pump_detuning = -rng.uniform(10.0, 1e3);
            p.single_photon_rabi = rng.uniform(0.0, 10.0);
            p.pump_rabi = rng.uniform(0.0, 10.0);
            p.atom_number = 1000;
            p.recoil = rng.uniform(0.1, 10.0);
            p.photon_loss = rng.uniform(0.0, 5.0);
            const double c = rng.uniform(0.5, 20.0);
            PhysicalInputs ps = p;
            ps.atom_pump_detuning *= c;
            ps.cavity_pump_detuning *= c;
            ps.single_photon_rabi *= c;
            ps.pump_rabi *= c;
            *ps.recoil *= c;
            ps.photon_loss *= c;
            ReducedParams a, b;
            try {
                a = reduce_parameters(p);
                b = reduce_parameters(ps);
            } catch (const RegimeError&) {
                continue;  // draw hit the regime boundary; covariance is about accepted points
            }
            for (auto [x, y] : {std::pair{a.omega_R * c, b.omega_R}, {a.delta_C * c, b.delta_C},
                                {a.u * c, b.u}, {a.y * c, b.y}, {a.kappa * c, b.kappa}}) {
                worst = std::max(worst, std::abs(x - y) / std::max(1e-300, std::abs(x)));
            }
        }
        std::ostringstream d;
        d << "worst relative deviation " << worst;
        s.check("params.scale_covariance", worst < 1e-12, d.str());
    });

    s.guarded("params.y_squared_roundtrip", [&] {
        PhysicalInputs p;
        p.atom_pump_detuning = -3.7e6;
        p.cavity_pump_detuning = -250.0;
        p.single_photon_rabi = 27.15;
        p.pump_rabi = 1833.0;
        p.atom_number = 48231;
        p.recoil = 1.0;
        p.photon_loss = 1.0;
        const ReducedParams r = reduce_parameters(p);
        const double expected = 2.0 * p.atom_number * p.pump_rabi * p.pump_rabi *
                                p.single_photon_rabi * p.single_photon_rabi /
                                (p.atom_pump_detuning * p.atom_pump_detuning);
        const double rel = std::abs(r.y * r.y - expected) / expected;
        s.check("params.y_squared_roundtrip", rel < 1e-14, "rel = " + std::to_string(rel));
    });

    s.guarded("params.regime_rejection", [&] {
        bool ok = false;
        try {
            ReducedParams bad = fig_params(1.0);
            bad.delta_C = 1.0;
            check_reduced(bad);
        } catch (const RegimeError& e) {
            ok = std::string(e.what()).find("delta_C") != std::string::npos;
        }
        s.check("params.regime_rejection", ok);
    });
}

void check_meanfield(Suite& s) {
    s.guarded("meanfield.quadratic_residual", [&] {
        double worst = 0.0;
        const ReducedParams base = fig_params(0.0);
        for (int i = 0; i <= 200; ++i) {
            ReducedParams r = base;
            r.y = 10.0 + 10.0 * i / 200.0;  // y in (y_crit, 2 y_crit]
            if (r.y <= 10.0) continue;
            const auto mf = solve_displacements(r);
            const double x = mf.beta0 * mf.beta0;
            const double A = r.u / r.delta_C;
            const double C = (r.delta_C + r.y * r.y) / (r.u + r.y * r.y);
            const double resid = std::abs(A * x * x - 2.0 * x + C);
            const double tol = 1e-12 * std::max(1.0, std::abs(r.delta_C + r.y * r.y) /
                                                          std::abs(r.u + r.y * r.y));
            worst = std::max(worst, resid / tol);
        }
        s.check("meanfield.quadratic_residual", worst < 1.0,
                "worst residual / tolerance = " + std::to_string(worst));
    });

    s.guarded("meanfield.stationarity_residuals", [&] {
        double worst = 0.0;
        for (double y : {10.5, 12.0, 15.0, 20.0, 19.99}) {
            const auto mf = solve_displacements(fig_params(y));
            worst = std::max({worst, std::abs(mf.residual_a), std::abs(mf.residual_b)});
        }
        s.check("meanfield.stationarity_residuals", worst < 1e-10,
                "worst |residual| = " + std::to_string(worst));
    });

    s.guarded("meanfield.u_to_zero_limit", [&] {
        const double y = 14.0;
        double prev_err = 1e300;
        bool linear = true;
        for (double u : {-0.4, -0.04, -0.004}) {
            ReducedParams r = fig_params(y);
            r.u = u;
            r.delta_C = -100.0 - 2.0 * 0.0;
            const double yc2 = -r.delta_C;
            const auto mf = solve_displacements(r);
            const double u0 = (y * y - yc2) / (2.0 * y * y);
            const double err = std::abs(mf.beta0 * mf.beta0 - u0);
            if (err > 0.2 * prev_err) linear = false;  // should shrink ~10x per step
            prev_err = err;
        }
        s.check("meanfield.u_to_zero_limit", linear);
    });

    s.guarded("meanfield.monotone_order_parameters", [&] {
        const ReducedParams base = fig_params(0.0);
        double pb = -1.0, pa = -1.0;
        bool mono = true;
        for (int i = 0; i <= 400; ++i) {
            ReducedParams r = base;
            r.y = 20.0 * i / 400.0;
            const auto mf = solve_displacements(r);
            if (mf.beta0 * mf.beta0 < pb - 1e-14 || mf.alpha0 * mf.alpha0 < pa - 1e-14) mono = false;
            pb = mf.beta0 * mf.beta0;
            pa = mf.alpha0 * mf.alpha0;
            if (r.y <= 10.0 && (mf.alpha0 != 0.0 || mf.beta0 != 0.0)) mono = false;
        }
        s.check("meanfield.monotone_order_parameters", mono);
    });
}

void check_fluctuations(Suite& s) {
    s.guarded("fluctuations.drift_eigenvalues_match", [&] {
        Lcg rng(23);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const ReducedParams r = random_stable(rng);
            const auto q = coeffs_at(r);
            const auto spec = eigenfrequencies(q);
            Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(drift_matrix(q));
            std::vector<double> imag;
            for (int k = 0; k < 4; ++k) imag.push_back(es.eigenvalues()[k].imag());
            std::sort(imag.begin(), imag.end());
            const double scale = std::max(spec.omega_plus, 1.0);
            worst = std::max(worst, std::abs(imag[0] + spec.omega_plus) / scale);
            worst = std::max(worst, std::abs(imag[1] + spec.omega_minus) / scale);
            worst = std::max(worst, std::abs(imag[2] - spec.omega_minus) / scale);
            worst = std::max(worst, std::abs(imag[3] - spec.omega_plus) / scale);
            for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(es.eigenvalues()[k].real()) / scale);
        }
        s.check("fluctuations.drift_eigenvalues_match", worst < 1e-8,
                "worst relative deviation " + std::to_string(worst));
    });

    s.guarded("fluctuations.decomposition_identities", [&] {
        Lcg rng(37);
        double worst = 0.0;
        for (int i = 0; i < 60; ++i) {
            const auto q = coeffs_at(random_stable(rng));
            const auto m = mode_decomposition(q);
            Eigen::Matrix4cd complete = Eigen::Matrix4cd::Zero();
            for (const Mode& a : m.modes) {
                for (const Mode& b : m.modes) {
                    const std::complex<double> dot = a.left.dot(b.right);
                    const double expect = (&a == &b) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(dot - expect));
                }
                complete += a.right * a.left.adjoint();
                const double boson = std::norm(a.left[0]) - std::norm(a.left[1]) +
                                     std::norm(a.left[2]) - std::norm(a.left[3]);
                const double expect_boson = a.kind == ModeKind::Annihilation ? 1.0 : -1.0;
                worst = std::max(worst, std::abs(boson - expect_boson));
                worst = std::max(worst,
                                 (drift_matrix(q) * a.right -
                                  std::complex<double>(0, -a.frequency) * a.right).norm());
            }
            worst = std::max(worst, (complete - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff());
        }
        s.check("fluctuations.decomposition_identities", worst < 1e-10,
                "worst identity deviation " + std::to_string(worst));
    });

    s.guarded("fluctuations.critical_point_criterion", [&] {
        const ReducedParams r = fig_params(10.0);
        const auto q = coeffs_at(r);
        const auto spec = eigenfrequencies(q);
        const bool at = spec.stable && spec.omega_minus < 1e-6 &&
                        std::abs(q.m0 * q.mx - q.mc * q.mc) < 1e-8;
        const auto q2 = coeffs_at(fig_params(6.0));
        const auto spec2 = eigenfrequencies(q2);
        const bool away = spec2.stable && spec2.omega_minus > 0.5 &&
                          std::abs(q2.m0 * q2.mx - q2.mc * q2.mc) > 1.0;
        s.check("fluctuations.critical_point_criterion", at && away);
    });

    s.guarded("fluctuations.two_mode_squeezed_structure", [&] {
        const auto q = coeffs_at(fig_params(6.0));
        const bool coeff_zero = (q.mx - q.my) == 0.0;
        const auto sq = ground_state_symplectic(q);
        const double off = std::max({std::abs(sq.covariance(0, 1)), std::abs(sq.covariance(2, 3)),
                                     std::abs(sq.covariance(0, 2)), std::abs(sq.covariance(1, 3))});
        s.check("fluctuations.two_mode_squeezed_structure", coeff_zero && off < 1e-12,
                "max spurious covariance entry " + std::to_string(off));
    });

    s.guarded("fluctuations.population_dual_route", [&] {
        double worst = 0.0;
        for (double y : {2.0, 6.0, 9.5, 12.0, 20.0}) {
            const auto q = coeffs_at(fig_params(y));
            const auto a = ground_state_populations(q);
            const auto b = ground_state_symplectic(q).stats;
            if (y > 0.0) {
                worst = std::max(worst, std::abs(a.n_photon - b.n_photon) /
                                            std::max(a.n_photon, 1e-300));
                worst = std::max(worst, std::abs(a.n_atom - b.n_atom) / std::max(a.n_atom, 1e-300));
            }
        }
        s.check("fluctuations.population_dual_route", worst < 1e-8,
                "worst relative deviation " + std::to_string(worst));
    });

    s.guarded("fluctuations.population_divergence", [&] {
        const double a = ground_state_populations(coeffs_at(fig_params(9.0))).n_atom;
        const double b = ground_state_populations(coeffs_at(fig_params(9.9))).n_atom;
        const double c = ground_state_populations(coeffs_at(fig_params(9.99))).n_atom;
        s.check("fluctuations.population_divergence", a < b && b < c);
    });

    s.guarded("fluctuations.flip_symmetry", [&] {
        const ReducedParams r = fig_params(15.0);
        const auto mf = solve_displacements(r);
        MeanFieldSolution flipped = mf;
        flipped.alpha0 = -mf.alpha0;
        flipped.beta0 = -mf.beta0;
        const auto qa = quadratic_coefficients(r, mf);
        const auto qb = quadratic_coefficients(r, flipped);
        const auto sa = eigenfrequencies(qa);
        const auto sb = eigenfrequencies(qb);
        const double dev = std::max(std::abs(sa.omega_plus - sb.omega_plus),
                                    std::abs(sa.omega_minus - sb.omega_minus));
        s.check("fluctuations.flip_symmetry", dev < 1e-12);
    });
}

void check_noise(Suite& s) {
    s.guarded("noise.completeness_zeroing", [&] {
        const auto q = coeffs_at(fig_params(6.0));
        const auto m = mode_decomposition(q);
        const double wp = eigenfrequencies(q).omega_plus;
        const double rate = rate_populations(m, 1.0, 1.0 / (2.5 * wp));
        s.check("noise.completeness_zeroing", std::abs(rate) < 1e-10,
                "rate = " + std::to_string(rate));
    });

    s.guarded("noise.kappa_linearity", [&] {
        const ReducedParams r = fig_params(6.0);
        const auto q = coeffs_at(r);
        const auto m = mode_decomposition(q);
        const double dt = default_coarse_grain_dt(r);
        double worst = 0.0;
        for (double k : {0.25, 0.5, 2.0}) {
            worst = std::max(worst, std::abs(rate_populations(m, k, dt) -
                                             k * rate_populations(m, 1.0, dt)));
            worst = std::max(worst,
                             std::abs(rate_normal_modes(m, k) - k * rate_normal_modes(m, 1.0)));
        }
        s.check("noise.kappa_linearity", worst < 1e-14);
    });

    s.guarded("noise.monotone_below_threshold", [&] {
        double prev_m = -1.0, prev_p = -1.0, prev_a = -1.0;
        bool mono = true;
        for (int i = 1; i <= 60; ++i) {
            ReducedParams r = fig_params(9.9 * i / 60.0);
            const auto q = coeffs_at(r);
            const auto m = mode_decomposition(q);
            const double dt = default_coarse_grain_dt(r);
            const double rm = rate_normal_modes(m, 1.0);
            const double rp = rate_populations(m, 1.0, dt);
            const double ra = rate_adiabatic(q, r);
            if (rm < prev_m - 1e-14 || rp < prev_p - 1e-14 || ra < prev_a - 1e-14) mono = false;
            prev_m = rm; prev_p = rp; prev_a = ra;
        }
        s.check("noise.monotone_below_threshold", mono);
    });

    s.guarded("noise.critical_limit_continuity", [&] {
        double worst = 0.0;
        for (double eps : {1e-3, 1e-4, 1e-5}) {
            ReducedParams r = fig_params(10.0 * (1.0 - eps));
            const auto q = coeffs_at(r);
            const double dt = default_coarse_grain_dt(r);
            const double direct = rate_populations(mode_decomposition(q), 1.0, dt);
            const double proj = critical_rate_populations(q, 1.0, dt);
            worst = std::max(worst, std::abs(direct - proj) / std::max(direct, 1e-300));
        }
        s.check("noise.critical_limit_continuity", worst < 1e-8,
                "worst relative deviation " + std::to_string(worst));
    });

    s.guarded("noise.covariance_slope_vs_rate", [&] {
        const ReducedParams r = fig_params(6.0);
        const auto q = coeffs_at(r);
        const auto m = mode_decomposition(q);
        const double dt = default_coarse_grain_dt(r);
        std::vector<double> ts(801);
        for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = 0.1 * i / (ts.size() - 1);
        const auto dn = covariance_evolution(m, 1.0, ts);
        const auto cuts = cut_pair_frequencies(m, dt);
        const double slope = secular_slope(ts, dn, 0.05, 0.1, cuts);
        const double rate = rate_populations(m, 1.0, dt);
        const double rel = std::abs(slope - rate) / rate;
        s.check("noise.covariance_slope_vs_rate", rel < 0.1,
                "relative deviation " + std::to_string(rel));
    });
}

void check_oracle(Suite& s) {
    s.guarded("ed.decoupled_limit", [&] {
        ReducedParams r = fig_params(0.0);
        r.atom_number = 8;
        const ed::SpinPhotonBasis basis(8, 6);
        const auto res = ed::ground_state_solve(r, basis);
        const bool ok = std::abs(res.ground_energy + 4.0) < 1e-12 && std::abs(res.gap - 1.0) < 1e-12;
        s.check("ed.decoupled_limit", ok);
    });

    s.guarded("ed.parity_block_structure", [&] {
        ReducedParams r = fig_params(13.0);
        r.atom_number = 6;
        const ed::SpinPhotonBasis basis(6, 8);
        const auto H = ed::build_hamiltonian(r, basis);
        bool ok = true;
        double asym = 0.0;
        for (int c = 0; c < H.outerSize(); ++c) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(H, c); it; ++it) {
                const int nr = static_cast<int>(it.row()) / (basis.atom_number + 1);
                const int mr = static_cast<int>(it.row()) % (basis.atom_number + 1);
                const int nc = c / (basis.atom_number + 1);
                const int mc = c % (basis.atom_number + 1);
                if (((nr + mr) % 2) != ((nc + mc) % 2)) ok = false;
                asym = std::max(asym, std::abs(it.value() - H.coeff(c, it.row())));
            }
        }
        s.check("ed.parity_block_structure", ok && asym == 0.0);
    });

    s.guarded("ed.gauge_invariance", [&] {
        ReducedParams r = fig_params(13.0);
        r.atom_number = 6;
        const ed::SpinPhotonBasis basis(6, 14);
        const auto res = ed::ground_state_solve(r, basis);
        Eigen::MatrixXcd Hc(ed::build_hamiltonian_unrotated(r, basis));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hc);
        const double dev_e = std::abs(es.eigenvalues()[0] - res.ground_energy);
        double nph = 0.0;
        for (int n = 0; n <= basis.photon_cutoff; ++n) {
            for (int m = 0; m <= basis.atom_number; ++m) {
                nph += std::norm(es.eigenvectors()(basis.index(n, m), 0)) * n;
            }
        }
        const double dev_n = std::abs(nph - res.n_photon_per_N * basis.atom_number);
        s.check("ed.gauge_invariance", dev_e < 1e-10 && dev_n < 1e-10,
                "dE = " + std::to_string(dev_e) + ", dn = " + std::to_string(dev_n));
    });

    s.guarded("ed.variational_bound", [&] {
        ReducedParams r = fig_params(20.0);
        r.atom_number = 12;
        const auto mf = solve_displacements(r);
        const auto res = ed::ground_state_solve(r, ed::SpinPhotonBasis(12, 40));
        const double e_mf = ed::coherent_state_energy(r, 12, mf.alpha0, mf.beta0);
        s.check("ed.variational_bound", res.ground_energy <= e_mf + 1e-10,
                "E0 = " + std::to_string(res.ground_energy) + ", E_mf = " + std::to_string(e_mf));
    });

    s.guarded("ed.finite_size_trend", [&] {
        ReducedParams r = fig_params(20.0);
        const auto mf = solve_displacements(r);
        const double b2 = mf.beta0 * mf.beta0;
        const std::vector<int> ns{6, 12};
        const auto scan = ed::finite_size_scan(r, ns);
        const double d0 = std::abs(scan.rows[0].result.order_param_beta2 - b2);
        const double d1 = std::abs(scan.rows[1].result.order_param_beta2 - b2);
        s.check("ed.finite_size_trend", d1 < d0,
                "|diff| N=6: " + std::to_string(d0) + ", N=12: " + std::to_string(d1));
    });
}

} // namespace

std::vector<CheckResult> run_validation_suite() {
    Suite s;
    check_params(s);
    check_meanfield(s);
    check_fluctuations(s);
    check_noise(s);
    check_oracle(s);
    return s.results;
}

} // namespace dicke
