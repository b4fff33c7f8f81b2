// fluctuations.hpp — quadratic Hamiltonian, normal modes, drift matrix, ground-state populations
//
// The fluctuation Hamiltonian around the mean field is
//   H = M0 a'a + (Mx+My)/2 b'b + (Mx-My)/4 (b'^2 + b^2) + i/2 Mc (a'-a)(b'+b)
// (primes denote daggers; the additive constant is not computed). Operators are
// arranged as R = [a, a', b, b'] and all mode machinery lives on the 4x4 drift
// matrix M defined by dR/dt = -i[R, H] = M R.

#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "dicke/meanfield.hpp"
#include "dicke/params.hpp"

namespace dicke {

struct QuadraticCoeffs {
    double m0{};
    double mx{};
    double my{};
    double mc{};
};

struct NormalModeSpectrum {
    double omega_plus{};    // NaN when not real
    double omega_minus{};   // NaN when not real
    bool stable{};          // both squared frequencies real and >= 0
};

enum class ModeKind { Annihilation, Creation };
enum class ModeFamily { Plus, Minus };

/// One normal mode of the drift matrix: M r = -i f r, l' M = -i f l'
/// (l' = conjugate transpose). Frequency f is signed: +omega for
/// annihilation-like, -omega for the creation-like partner.
/// Normalization: (l, r) = 1 and [rho, rho'] = |l1|^2-|l2|^2+|l3|^2-|l4|^2 = +1
/// for annihilation-like modes; creation partners are the swap-conjugates
/// (components 1<->2, 3<->4, conjugated).
struct Mode {
    double frequency{};
    Eigen::Vector4cd left;
    Eigen::Vector4cd right;
    ModeKind kind{};
    ModeFamily family{};
};

/// Drift matrix plus the four biorthonormalized left/right eigenvector pairs.
/// Mode order: (Plus, Annihilation), (Plus, Creation), (Minus, Annihilation), (Minus, Creation).
struct ModeDecomposition {
    Eigen::Matrix4cd drift;
    std::array<Mode, 4> modes;

    const Mode& mode(ModeFamily f, ModeKind k) const {
        return modes[2 * (f == ModeFamily::Minus ? 1 : 0) + (k == ModeKind::Creation ? 1 : 0)];
    }
};

struct GroundStateStats {
    double n_photon{};  // <a'a> in the displaced frame
    double n_atom{};    // <b'b>
    bool diverged{};    // omega_minus below the critical threshold; values are NaN
};

/// Ground-state covariance from the symplectic (Williamson) route, kept for
/// cross-checks: sigma_ij = <{xi_i, xi_j}>/2 over xi = (x_a, p_a, x_b, p_b).
struct SymplecticGroundState {
    Eigen::Matrix4d covariance;
    std::array<double, 2> symplectic_eigenvalues;
    GroundStateStats stats;
};

/// Closed-form coefficients evaluated at the mean field. Throws SingularError at beta0^2 = 1.
QuadraticCoeffs quadratic_coefficients(const ReducedParams& r, const MeanFieldSolution& s);

/// omega_+- from the biquadratic characteristic polynomial. The small root is
/// evaluated as omega_-^2 = M0 My (M0 Mx - Mc^2) / (S + sqrt(D)) to avoid
/// cancellation near the critical point. Instability is reported via the flag,
/// not an exception.
NormalModeSpectrum eigenfrequencies(const QuadraticCoeffs& q);

/// The 4x4 drift matrix over R = [a, a', b, b'].
Eigen::Matrix4cd drift_matrix(const QuadraticCoeffs& q);

/// Frequency scale used for critical/degeneracy thresholds: sqrt(Mx My),
/// which equals omega_R exactly below threshold.
double frequency_unit(const QuadraticCoeffs& q);

/// Both eigenvector pairs of one family (annihilation-like then creation-like),
/// built from closed-form null-space solves and the left-right relation
/// l = diag(-1,1,1,-1) conj(r). Valid whenever this family's frequency is
/// positive and non-degenerate; usable for the plus family even at the critical point.
std::array<Mode, 2> mode_family(const QuadraticCoeffs& q, ModeFamily family);

/// Full four-mode decomposition. Throws NumericalError (unstable spectrum) or
/// DegenerateModeError (omega_- at the critical threshold, or omega_+ ~ omega_-).
ModeDecomposition mode_decomposition(const QuadraticCoeffs& q);

/// Least-squares exponent of omega_- against |1 - y/y_crit| on a geometric grid.
/// The window must satisfy 0 < min < max <= 1e-2 (relative distance to threshold).
enum class ThresholdSide { Below, Above };
double gap_exponent(const ReducedParams& r, ThresholdSide side, double window_min,
                    double window_max, int points = 16);

/// Populations of the displaced-frame vacuum of the normal modes, by mode
/// contraction: <R_i R_j> = sum over annihilation-like m of r_i^(m) r_j^(m').
GroundStateStats ground_state_populations(const QuadraticCoeffs& q);

/// Independent route: Williamson symplectic diagonalization of the quadrature
/// Hamiltonian 1/2 xi^T V xi. Must agree with ground_state_populations to 1e-8 relative.
SymplecticGroundState ground_state_symplectic(const QuadraticCoeffs& q);

} // namespace dicke
