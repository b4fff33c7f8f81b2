#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "dicke/fluctuations.hpp"

using namespace dicke;

namespace {

ReducedParams fig_params(double y, double u = -0.1, double delta_C = -100.0) {
    ReducedParams r;
    r.delta_C = delta_C;
    r.u = u;
    r.y = y;
    r.kappa = 1.0;
    return r;
}

QuadraticCoeffs coeffs_at(const ReducedParams& r) {
    return quadratic_coefficients(r, solve_displacements(r));
}

struct Lcg {
    std::uint64_t s;
    double uniform(double lo, double hi) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return lo + (hi - lo) * (static_cast<double>(s >> 11) * 0x1.0p-53);
    }
};

ReducedParams random_stable(Lcg& rng) {
    for (;;) {
        ReducedParams r;
        r.delta_C = -rng.uniform(3.0, 300.0);
        r.u = rng.uniform(-0.8, 0.8) * std::abs(r.delta_C);
        r.kappa = 1.0;
        const double yc = std::sqrt(-r.delta_C);
        r.y = rng.uniform(0.0, 1.8) * yc;
        if (std::abs(r.y - yc) < 0.05 * yc) continue;
        const auto spec = eigenfrequencies(coeffs_at(r));
        if (spec.stable && spec.omega_minus > 1e-3 &&
            spec.omega_plus - spec.omega_minus > 1e-6 * spec.omega_plus) {
            return r;
        }
    }
}

} // namespace

TEST_CASE("quadratic coefficients in the normal phase") {
    for (double y : {0.0, 4.0, 9.0}) {
        const auto q = coeffs_at(fig_params(y));
        CHECK(q.m0 == 100.0);
        CHECK(q.mx == 1.0);
        CHECK(q.my == 1.0);
        CHECK(q.mc == y);
        CHECK(q.mx - q.my == 0.0);
    }
}

TEST_CASE("u = 0 coefficients at beta0^2 = 1/4 against hand-derived values") {
    const double y = 10.0 * std::sqrt(2.0);
    const auto q = coeffs_at(fig_params(y, 0.0));
    CHECK(q.m0 == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(q.mx == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(q.my == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(q.mc == doctest::Approx(10.0 * std::sqrt(6.0) / 3.0).epsilon(1e-13));
    CHECK(q.mx != q.my);  // single-mode squeezing switches on above threshold
}

TEST_CASE("superradiant coefficients, regression-pinned") {
    const auto q = coeffs_at(fig_params(20.0));
    CHECK(q.m0 == doctest::Approx(99.96248358524879).epsilon(1e-13));
    CHECK(q.mx == doctest::Approx(6.404083894772512).epsilon(1e-12));
    CHECK(q.my == doctest::Approx(2.500281425901088).epsilon(1e-12));
    CHECK(q.mc == doctest::Approx(6.328946266900842).epsilon(1e-12));
}

TEST_CASE("coefficients are singular at beta0^2 = 1") {
    MeanFieldSolution s;
    s.alpha0 = -0.1;
    s.beta0 = 1.0;
    s.phase = Phase::Superradiant;
    CHECK_THROWS_AS(quadratic_coefficients(fig_params(15.0), s), SingularError);
}

TEST_CASE("eigenfrequencies: decoupled, reference and critical points") {
    SUBCASE("y = 0 is exact") {
        const auto spec = eigenfrequencies(coeffs_at(fig_params(0.0)));
        CHECK(spec.stable);
        CHECK(spec.omega_plus == 100.0);
        CHECK(spec.omega_minus == 1.0);
    }
    SUBCASE("y = 6 against the naive evaluation and the large-detuning approximation") {
        const auto spec = eigenfrequencies(coeffs_at(fig_params(6.0)));
        const double naive = std::sqrt(5000.5 - std::sqrt(9999.0 * 9999.0 / 4.0 + 3600.0));
        CHECK(spec.omega_minus == doctest::Approx(naive).epsilon(1e-10));
        CHECK(spec.omega_minus == doctest::Approx(0.8).epsilon(1e-4));
        CHECK(spec.omega_plus == doctest::Approx(100.0018000990014).epsilon(1e-12));
    }
    SUBCASE("gap closes at threshold") {
        const auto spec = eigenfrequencies(coeffs_at(fig_params(10.0)));
        CHECK(spec.stable);
        CHECK(spec.omega_minus < 1e-6);
    }
}

TEST_CASE("instability is a flag, not an exception") {
    SUBCASE("complex squared frequencies") {
        const auto spec = eigenfrequencies(QuadraticCoeffs{1.0, 1.0, -4.0, 3.0});
        CHECK_FALSE(spec.stable);
        CHECK(std::isnan(spec.omega_plus));
        CHECK(std::isnan(spec.omega_minus));
    }
    SUBCASE("negative omega_minus^2") {
        const auto spec = eigenfrequencies(QuadraticCoeffs{1.0, -1.0, 1.0, 1.0});
        CHECK_FALSE(spec.stable);
        CHECK(std::isnan(spec.omega_minus));
    }
}

TEST_CASE("gap exponent is 1/2 on both sides of threshold") {
    const ReducedParams r = fig_params(0.0);
    const double below = gap_exponent(r, ThresholdSide::Below, 1e-4, 1e-2);
    const double above = gap_exponent(r, ThresholdSide::Above, 1e-4, 1e-2);
    CHECK(below == doctest::Approx(0.5).epsilon(0.04));
    CHECK(above == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("gap exponent refuses windows away from the critical point") {
    const ReducedParams r = fig_params(0.0);
    CHECK_THROWS_AS(gap_exponent(r, ThresholdSide::Below, 0.5, 0.9), ConfigError);
    CHECK_THROWS_AS(gap_exponent(r, ThresholdSide::Below, 1e-3, 2e-2), ConfigError);
    CHECK_THROWS_AS(gap_exponent(r, ThresholdSide::Below, 0.0, 1e-2), ConfigError);
}

TEST_CASE("drift matrix structure") {
    SUBCASE("decoupled blocks at Mc = 0") {
        const QuadraticCoeffs q{7.0, 3.0, 3.0, 0.0};
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(drift_matrix(q));
        std::vector<double> im;
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(es.eigenvalues()[i].real()) < 1e-12);
            im.push_back(es.eigenvalues()[i].imag());
        }
        std::sort(im.begin(), im.end());
        CHECK(im[0] == doctest::Approx(-7.0));
        CHECK(im[1] == doctest::Approx(-3.0));
        CHECK(im[2] == doctest::Approx(3.0));
        CHECK(im[3] == doctest::Approx(7.0));
    }
    SUBCASE("trace vanishes (no damping terms)") {
        const auto M = drift_matrix(coeffs_at(fig_params(13.0)));
        CHECK(std::abs(M.trace().real()) < 1e-14);
        CHECK(std::abs(M.trace().imag()) < 1e-12);
    }
    SUBCASE("reference point matches the closed-form spectrum to 1e-8") {
        const auto q = coeffs_at(fig_params(6.0));
        const auto spec = eigenfrequencies(q);
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(drift_matrix(q));
        std::vector<double> im;
        for (int i = 0; i < 4; ++i) im.push_back(es.eigenvalues()[i].imag());
        std::sort(im.begin(), im.end());
        CHECK(im[3] == doctest::Approx(spec.omega_plus).epsilon(1e-8));
        CHECK(im[2] == doctest::Approx(spec.omega_minus).epsilon(1e-8));
    }
}

TEST_CASE("drift eigenvalues match the closed form over random stable draws") {
    Lcg rng{101};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto q = coeffs_at(random_stable(rng));
        const auto spec = eigenfrequencies(q);
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(drift_matrix(q));
        std::vector<double> im;
        for (int k = 0; k < 4; ++k) im.push_back(es.eigenvalues()[k].imag());
        std::sort(im.begin(), im.end());
        const double scale = std::max(1.0, spec.omega_plus);
        worst = std::max(worst, std::abs(im[0] + spec.omega_plus) / scale);
        worst = std::max(worst, std::abs(im[1] + spec.omega_minus) / scale);
        worst = std::max(worst, std::abs(im[2] - spec.omega_minus) / scale);
        worst = std::max(worst, std::abs(im[3] - spec.omega_plus) / scale);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("mode decomposition at y = 0 is the identity permutation") {
    const auto m = mode_decomposition(coeffs_at(fig_params(0.0)));
    const auto& photon = m.mode(ModeFamily::Plus, ModeKind::Annihilation);
    CHECK(std::abs(photon.left[0] - 1.0) < 1e-14);
    CHECK(std::abs(photon.right[0] - 1.0) < 1e-14);
    CHECK(photon.left.tail<3>().norm() < 1e-14);
    const auto& atom = m.mode(ModeFamily::Minus, ModeKind::Annihilation);
    CHECK(std::abs(atom.left[2] - 1.0) < 1e-14);
    CHECK(std::abs(atom.right[2] - 1.0) < 1e-14);
}

TEST_CASE("biorthogonality, completeness, eigen-equations and adjoint pairing") {
    for (double y : {2.0, 6.0, 9.9, 12.0, 15.0, 20.0}) {
        const auto q = coeffs_at(fig_params(y));
        const auto m = mode_decomposition(q);
        const auto M = drift_matrix(q);

        Eigen::Matrix4cd completeness = Eigen::Matrix4cd::Zero();
        for (const Mode& a : m.modes) {
            for (const Mode& b : m.modes) {
                const std::complex<double> dot = a.left.dot(b.right);
                const double expected = (&a == &b) ? 1.0 : 0.0;
                CHECK(std::abs(dot - expected) < 1e-10);
            }
            completeness += a.right * a.left.adjoint();
            const Eigen::Vector4cd resid =
                M * a.right - std::complex<double>(0.0, -a.frequency) * a.right;
            CHECK(resid.norm() < 1e-10 * std::max(1.0, std::abs(a.frequency)));
        }
        CHECK((completeness - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);

        // creation partners are the swap-conjugates of their annihilation modes
        for (int fam = 0; fam < 2; ++fam) {
            const Mode& an = m.modes[2 * fam];
            const Mode& cr = m.modes[2 * fam + 1];
            CHECK(cr.frequency == -an.frequency);
            for (int i : {0, 1, 2, 3}) {
                const int j = (i % 2 == 0) ? i + 1 : i - 1;
                CHECK(std::abs(cr.left[i] - std::conj(an.left[j])) < 1e-12);
                CHECK(std::abs(cr.right[i] - std::conj(an.right[j])) < 1e-12);
            }
        }
    }
}

TEST_CASE("bosonic commutator normalization") {
    for (double y : {6.0, 15.0}) {
        const auto m = mode_decomposition(coeffs_at(fig_params(y)));
        for (const Mode& mode : m.modes) {
            const double comm = std::norm(mode.left[0]) - std::norm(mode.left[1]) +
                                std::norm(mode.left[2]) - std::norm(mode.left[3]);
            const double expected = mode.kind == ModeKind::Annihilation ? 1.0 : -1.0;
            CHECK(comm == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("decomposition refuses critical and near-degenerate spectra") {
    CHECK_THROWS_AS(mode_decomposition(coeffs_at(fig_params(10.0))), DegenerateModeError);
    CHECK_THROWS_AS(mode_decomposition(QuadraticCoeffs{1.0, 1.0, -4.0, 3.0}), NumericalError);
    // omega_plus == omega_minus: decoupled with matching frequencies
    CHECK_THROWS_AS(mode_decomposition(QuadraticCoeffs{3.0, 3.0, 3.0, 0.0}), DegenerateModeError);
}

TEST_CASE("ground-state populations: uncoupled vacuum and divergence at threshold") {
    const auto zero = ground_state_populations(coeffs_at(fig_params(0.0)));
    CHECK(zero.n_photon == 0.0);
    CHECK(zero.n_atom == 0.0);
    CHECK_FALSE(zero.diverged);

    const double a = ground_state_populations(coeffs_at(fig_params(9.0))).n_atom;
    const double b = ground_state_populations(coeffs_at(fig_params(9.9))).n_atom;
    const double c = ground_state_populations(coeffs_at(fig_params(9.99))).n_atom;
    CHECK(a < b);
    CHECK(b < c);

    const auto critical = ground_state_populations(coeffs_at(fig_params(10.0)));
    CHECK(critical.diverged);
    CHECK(std::isnan(critical.n_photon));
}

TEST_CASE("population dual route: mode contraction vs Williamson") {
    for (double y : {2.0, 6.0, 9.5, 9.95, 12.0, 15.0, 20.0}) {
        const auto q = coeffs_at(fig_params(y));
        const auto modes = ground_state_populations(q);
        const auto sympl = ground_state_symplectic(q);
        CHECK(modes.n_photon ==
              doctest::Approx(sympl.stats.n_photon).epsilon(1e-8));
        CHECK(modes.n_atom == doctest::Approx(sympl.stats.n_atom).epsilon(1e-8));
    }
}

TEST_CASE("reference-point populations, regression-pinned") {
    const auto stats = ground_state_populations(coeffs_at(fig_params(6.0)));
    CHECK(stats.n_photon == doctest::Approx(0.0011071941830428).epsilon(1e-10));
    CHECK(stats.n_atom == doctest::Approx(0.0133837624146986).epsilon(1e-10));
}

TEST_CASE("symplectic eigenvalues coincide with the normal-mode frequencies") {
    for (double y : {3.0, 6.0, 14.0}) {
        const auto q = coeffs_at(fig_params(y));
        const auto spec = eigenfrequencies(q);
        const auto sympl = ground_state_symplectic(q);
        CHECK(sympl.symplectic_eigenvalues[0] ==
              doctest::Approx(spec.omega_minus).epsilon(1e-8));
        CHECK(sympl.symplectic_eigenvalues[1] ==
              doctest::Approx(spec.omega_plus).epsilon(1e-8));
    }
}

TEST_CASE("below threshold the ground state is a two-mode squeezed vacuum") {
    const auto q = coeffs_at(fig_params(6.0));
    CHECK(q.mx - q.my == 0.0);  // no single-mode squeezing generator
    const auto sq = ground_state_symplectic(q);
    // anomalous structure lives purely in the cross (x_a p_b, p_a x_b) entries
    CHECK(std::abs(sq.covariance(0, 1)) < 1e-12);
    CHECK(std::abs(sq.covariance(2, 3)) < 1e-12);
    CHECK(std::abs(sq.covariance(0, 2)) < 1e-12);
    CHECK(std::abs(sq.covariance(1, 3)) < 1e-12);
    CHECK(std::abs(sq.covariance(1, 2)) > 1e-3);
    CHECK(std::abs(sq.covariance(0, 3)) > 1e-3);
}

TEST_CASE("critical-point criterion: gap closes exactly when M0 Mx = Mc^2") {
    const auto qc = coeffs_at(fig_params(10.0));
    CHECK(std::abs(qc.m0 * qc.mx - qc.mc * qc.mc) < 1e-8);
    CHECK(eigenfrequencies(qc).omega_minus < 1e-6);

    const auto q = coeffs_at(fig_params(6.0));
    CHECK(std::abs(q.m0 * q.mx - q.mc * q.mc) > 1.0);
    CHECK(eigenfrequencies(q).omega_minus > 0.5);
}

TEST_CASE("spectrum is invariant under the Z2 order-parameter flip") {
    const ReducedParams r = fig_params(15.0);
    const auto mf = solve_displacements(r);
    MeanFieldSolution flipped = mf;
    flipped.alpha0 = -mf.alpha0;
    flipped.beta0 = -mf.beta0;
    const auto sa = eigenfrequencies(quadratic_coefficients(r, mf));
    const auto sb = eigenfrequencies(quadratic_coefficients(r, flipped));
    CHECK(sa.omega_plus == doctest::Approx(sb.omega_plus).epsilon(1e-14));
    CHECK(sa.omega_minus == doctest::Approx(sb.omega_minus).epsilon(1e-14));
}
