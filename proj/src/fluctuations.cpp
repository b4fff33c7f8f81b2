#include "dicke/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dicke {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::complex<double> kI{0.0, 1.0};

// Critical threshold on omega_minus, in units of frequency_unit(q).
constexpr double kCriticalTol = 1e-8;
// Relative degeneracy guard on omega_plus vs omega_minus.
constexpr double kDegeneracyTol = 1e-8;

} // namespace

QuadraticCoeffs quadratic_coefficients(const ReducedParams& r, const MeanFieldSolution& s) {
    const ReducedParams n = r.normalized();
    const double a0 = s.alpha0;
    const double b0 = s.beta0;
    const double b2 = b0 * b0;
    if (b2 >= 1.0) {
        throw SingularError("beta0^2 = 1: quadratic coefficients contain (1-beta0^2)^(-3/2)");
    }
    const double root = std::sqrt(1.0 - b2);

    QuadraticCoeffs q;
    q.m0 = -n.delta_C + n.u * b2;
    q.mx = 1.0 + n.u * a0 * a0 - n.y * a0 * b0 * (3.0 - 2.0 * b2) / (root * root * root);
    q.my = 1.0 + n.u * a0 * a0 - n.y * a0 * b0 / root;
    q.mc = 2.0 * n.u * a0 * b0 + n.y * (1.0 - 2.0 * b2) / root;

    q.m0 *= r.omega_R;
    q.mx *= r.omega_R;
    q.my *= r.omega_R;
    q.mc *= r.omega_R;
    return q;
}

NormalModeSpectrum eigenfrequencies(const QuadraticCoeffs& q) {
    const double mm = q.mx * q.my;
    const double S = 0.5 * (q.m0 * q.m0 + mm);
    const double D = 0.25 * (q.m0 * q.m0 - mm) * (q.m0 * q.m0 - mm) + q.m0 * q.my * q.mc * q.mc;

    NormalModeSpectrum spec;
    if (D < 0.0) {
        spec.omega_plus = kNaN;
        spec.omega_minus = kNaN;
        spec.stable = false;
        return spec;
    }
    const double sqrtD = std::sqrt(D);
    const double wp2 = S + sqrtD;

    // omega_-^2 = (S^2 - D)/(S + sqrt(D)) with the numerator in exact product
    // form; a rounding-level negative value at the critical point is clamped.
    const double P = q.m0 * q.my * (q.m0 * q.mx - q.mc * q.mc);
    const double noise = 32.0 * kEps *
        (std::abs(q.m0 * q.m0 * mm) + std::abs(q.m0 * q.my * q.mc * q.mc));
    double wm2 = (wp2 > 0.0) ? P / wp2 : 0.0;
    if (wm2 < 0.0 && P >= -noise) wm2 = 0.0;

    if (wp2 < 0.0 || wm2 < 0.0) {
        spec.omega_plus = wp2 >= 0.0 ? std::sqrt(wp2) : kNaN;
        spec.omega_minus = kNaN;
        spec.stable = false;
        return spec;
    }
    spec.omega_plus = std::sqrt(wp2);
    spec.omega_minus = std::sqrt(wm2);
    spec.stable = true;
    return spec;
}

Eigen::Matrix4cd drift_matrix(const QuadraticCoeffs& q) {
    const double hs = 0.5 * (q.mx + q.my);   // b'b coefficient
    const double ha = 0.5 * (q.mx - q.my);   // b^2 + b'^2 coefficient (x2)
    const double c = 0.5 * q.mc;
    Eigen::Matrix4cd M;
    M << -kI * q.m0,      0.0,        c,        c,
              0.0,   kI * q.m0,       c,        c,
               -c,        c,    -kI * hs, -kI * ha,
                c,       -c,     kI * ha,  kI * hs;
    return M;
}

double frequency_unit(const QuadraticCoeffs& q) {
    const double mm = q.mx * q.my;
    if (mm > 0.0) return std::sqrt(mm);
    return std::max({std::abs(q.mx), std::abs(q.my), 1e-300});
}

namespace {

Eigen::Vector4cd swap_conjugate(const Eigen::Vector4cd& v) {
    Eigen::Vector4cd w;
    w << std::conj(v[1]), std::conj(v[0]), std::conj(v[3]), std::conj(v[2]);
    return w;
}

// Right null vector of (M + i omega) for the annihilation-like mode of one
// family, from the closed-form parameterization by s = r3 + r4. The photon
// component r1 = -i (Mc/2) s / (M0 - omega) is rewritten through the
// characteristic identity M0 - omega = My M0 Mc^2 / ((M0+omega)(MxMy-omega^2))
// when M0 and omega nearly coincide, with the branch-stable form of
// MxMy - omega^2.
Eigen::Vector4cd raw_right_vector(const QuadraticCoeffs& q, double omega, bool plus_branch) {
    const double scale = std::max({std::abs(q.m0), std::abs(q.mx), std::abs(q.my), std::abs(q.mc)});
    if (std::abs(q.mc) < 1e-14 * scale) {
        // Decoupled families: pure photon mode or pure (squeezed) atomic mode.
        const double mm = q.mx * q.my;
        const double watom = mm >= 0.0 ? std::sqrt(mm) : -1.0;
        if (std::abs(omega - q.m0) <= std::abs(omega - watom)) {
            return Eigen::Vector4cd(1.0, 0.0, 0.0, 0.0);
        }
        if (std::abs(q.my) < 1e-14 * scale) {
            throw NumericalError("mode construction: My ~ 0 in the decoupled atomic family");
        }
        return Eigen::Vector4cd(0.0, 0.0, 0.5 * (1.0 + omega / q.my), 0.5 * (1.0 - omega / q.my));
    }
    if (std::abs(q.my) < 1e-14 * scale) {
        throw NumericalError("mode construction: My ~ 0");
    }

    double d0 = q.m0 - omega;
    if (std::abs(d0) <= 0.1 * std::max(std::abs(q.m0), omega)) {
        const double mm = q.mx * q.my;
        const double D = 0.25 * (q.m0 * q.m0 - mm) * (q.m0 * q.m0 - mm) + q.m0 * q.my * q.mc * q.mc;
        const double sqrtD = std::sqrt(std::max(D, 0.0));
        const double mmw = plus_branch ? -(0.5 * (q.m0 * q.m0 - mm) + sqrtD)
                                       : 0.5 * (mm - q.m0 * q.m0) + sqrtD;
        const double denom = (q.m0 + omega) * mmw;
        if (denom == 0.0) {
            throw NumericalError("mode construction: singular characteristic identity");
        }
        d0 = q.my * q.m0 * q.mc * q.mc / denom;
    }

    Eigen::Vector4cd r;
    r[0] = -kI * (0.5 * q.mc) / d0;
    r[1] = kI * (0.5 * q.mc) / (q.m0 + omega);
    r[2] = 0.5 * (1.0 + omega / q.my);
    r[3] = 0.5 * (1.0 - omega / q.my);
    return r;
}

} // namespace

std::array<Mode, 2> mode_family(const QuadraticCoeffs& q, ModeFamily family) {
    const NormalModeSpectrum spec = eigenfrequencies(q);
    if (!spec.stable) {
        throw NumericalError("unstable spectrum: squared eigenfrequency not real non-negative");
    }
    const bool plus = (family == ModeFamily::Plus);
    const double omega = plus ? spec.omega_plus : spec.omega_minus;
    if (!(omega > 0.0)) {
        throw DegenerateModeError("mode family frequency vanishes");
    }

    Eigen::Vector4cd r = raw_right_vector(q, omega, plus);

    // Left eigenvector from the transpose symmetry M^T = D M D, D = diag(-1,1,1,-1).
    const Eigen::Vector4d dsign(-1.0, 1.0, 1.0, -1.0);
    Eigen::Vector4cd l = (dsign.array() * r.array().conjugate()).matrix();

    const double bnorm = std::norm(l[0]) - std::norm(l[1]) + std::norm(l[2]) - std::norm(l[3]);
    if (!(bnorm > 0.0)) {
        throw NumericalError("mode construction: non-positive bosonic norm (anomalous mode)");
    }
    l /= std::sqrt(bnorm);
    r /= l.dot(r);  // (l, r) = 1; Eigen dot conjugates the left argument

    // Deterministic overall phase: largest component of r real positive.
    int imax = 0;
    r.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> phase = r[imax] / std::abs(r[imax]);
    r /= phase;
    l /= phase;

    Mode ann{omega, l, r, ModeKind::Annihilation, family};
    Mode cre{-omega, swap_conjugate(l), swap_conjugate(r), ModeKind::Creation, family};
    return {ann, cre};
}

ModeDecomposition mode_decomposition(const QuadraticCoeffs& q) {
    const NormalModeSpectrum spec = eigenfrequencies(q);
    if (!spec.stable) {
        throw NumericalError("unstable spectrum: squared eigenfrequency not real non-negative");
    }
    if (spec.omega_minus < kCriticalTol * frequency_unit(q)) {
        throw DegenerateModeError("critical point: omega_minus ~ 0, decomposition ill-posed");
    }
    if (spec.omega_plus - spec.omega_minus < kDegeneracyTol * spec.omega_plus) {
        throw DegenerateModeError("degenerate families: omega_plus ~ omega_minus");
    }

    const auto plus = mode_family(q, ModeFamily::Plus);
    const auto minus = mode_family(q, ModeFamily::Minus);
    return ModeDecomposition{drift_matrix(q), {plus[0], plus[1], minus[0], minus[1]}};
}

double gap_exponent(const ReducedParams& r, ThresholdSide side, double window_min,
                    double window_max, int points) {
    if (!(window_min > 0.0 && window_min < window_max && window_max <= 1e-2)) {
        throw ConfigError("gap_exponent: window must lie inside (0, 1e-2] in |1 - y/y_crit|");
    }
    if (points < 2) {
        throw ConfigError("gap_exponent: need at least 2 grid points");
    }
    const double yc = critical_coupling(r);
    const double ratio = window_max / window_min;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < points; ++i) {
        const double d = window_min * std::pow(ratio, static_cast<double>(i) / (points - 1));
        ReducedParams ri = r;
        ri.y = (side == ThresholdSide::Below) ? yc * (1.0 - d) : yc * (1.0 + d);
        const auto q = quadratic_coefficients(ri, solve_displacements(ri));
        const auto spec = eigenfrequencies(q);
        if (!spec.stable || !(spec.omega_minus > 0.0)) {
            throw NumericalError("gap_exponent: unstable or gapless spectrum inside the fit window");
        }
        const double x = std::log(d);
        const double y = std::log(spec.omega_minus);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = points;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GroundStateStats ground_state_populations(const QuadraticCoeffs& q) {
    const NormalModeSpectrum spec = eigenfrequencies(q);
    if (!spec.stable) {
        throw NumericalError("unstable spectrum: ground state undefined");
    }
    if (spec.omega_minus < kCriticalTol * frequency_unit(q)) {
        return {kNaN, kNaN, true};
    }
    const auto decomp = mode_decomposition(q);
    GroundStateStats stats;
    for (const Mode& m : decomp.modes) {
        if (m.kind != ModeKind::Annihilation) continue;
        stats.n_photon += std::norm(m.right[1]);
        stats.n_atom += std::norm(m.right[3]);
    }
    return stats;
}

SymplecticGroundState ground_state_symplectic(const QuadraticCoeffs& q) {
    const NormalModeSpectrum spec = eigenfrequencies(q);
    if (!spec.stable) {
        throw NumericalError("unstable spectrum: ground state undefined");
    }
    SymplecticGroundState out;
    if (spec.omega_minus < kCriticalTol * frequency_unit(q)) {
        out.covariance.setConstant(kNaN);
        out.symplectic_eigenvalues = {kNaN, kNaN};
        out.stats = {kNaN, kNaN, true};
        return out;
    }

    // Quadrature form 1/2 xi^T V xi over xi = (x_a, p_a, x_b, p_b).
    Eigen::Matrix4d V;
    V << q.m0, 0.0, 0.0, 0.0,
         0.0, q.m0, q.mc, 0.0,
         0.0, q.mc, q.mx, 0.0,
         0.0, 0.0, 0.0, q.my;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(V);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw NumericalError("quadrature Hamiltonian not positive definite away from threshold");
    }
    const Eigen::Matrix4d Vh =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    const Eigen::Matrix4d Vmh =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();

    Eigen::Matrix4d Omega = Eigen::Matrix4d::Zero();
    Omega(0, 1) = 1.0; Omega(1, 0) = -1.0; Omega(2, 3) = 1.0; Omega(3, 2) = -1.0;

    const Eigen::Matrix4d B = Vh * Omega * Vh;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> hs(kI * B.cast<std::complex<double>>());
    if (hs.info() != Eigen::Success) {
        throw NumericalError("symplectic diagonalization: Hermitian eigensolve failed");
    }

    // Positive eigenvalues nu_k with eigenvectors w = (u + i v)/sqrt(2)-normalized;
    // (sqrt2 v, sqrt2 u) span the invariant plane with B-block nu * Omega_1.
    Eigen::Matrix4d R;
    Eigen::Vector4d dscale;
    int col = 0;
    std::array<double, 2> nus{};
    for (int i = 3; i >= 0; --i) {
        const double nu = hs.eigenvalues()[i];
        if (nu <= 0.0) continue;
        if (col >= 4) throw NumericalError("symplectic diagonalization: eigenvalue pairing failed");
        const Eigen::Vector4cd w = hs.eigenvectors().col(i);
        R.col(col) = std::sqrt(2.0) * w.imag();
        R.col(col + 1) = std::sqrt(2.0) * w.real();
        dscale[col] = std::sqrt(nu);
        dscale[col + 1] = std::sqrt(nu);
        nus[col / 2] = nu;
        col += 2;
    }
    if (col != 4) {
        throw NumericalError("symplectic diagonalization: did not find two positive eigenvalues");
    }

    const Eigen::Matrix4d S = Vmh * R * dscale.asDiagonal();
    if ((S * Omega * S.transpose() - Omega).cwiseAbs().maxCoeff() > 1e-8) {
        throw NumericalError("symplectic diagonalization: transformation not symplectic");
    }

    out.covariance = 0.5 * S * S.transpose();
    out.symplectic_eigenvalues = {std::min(nus[0], nus[1]), std::max(nus[0], nus[1])};
    out.stats.n_photon = 0.5 * (out.covariance(0, 0) + out.covariance(1, 1) - 1.0);
    out.stats.n_atom = 0.5 * (out.covariance(2, 2) + out.covariance(3, 3) - 1.0);
    out.stats.diverged = false;
    return out;
}

} // namespace dicke
