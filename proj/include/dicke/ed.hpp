// ed.hpp — finite-N exact diagonalization of the two-mode spin-boson Hamiltonian
//
// Ground truth for the thermodynamic-limit results. The Hamiltonian
//   H = -delta_C a'a + omega_R S_z + i y (a' - a) S_x / sqrt(N) + u a'a (1/2 + S_z/N)
// is built on |n_photon> x |m> (m = c1-mode occupation, S_z = m - N/2) after the
// gauge rotation a -> i a that makes the matrix real symmetric. The parity
// (-1)^(n+m) is conserved and the solver diagonalizes each sector separately.

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/params.hpp"

namespace dicke {
namespace ed {

struct SpinPhotonBasis {
    int atom_number{};    // N, spin length N/2
    int photon_cutoff{};  // n_max

    SpinPhotonBasis(int N, int n_max);

    int dimension() const { return (atom_number + 1) * (photon_cutoff + 1); }
    int index(int n_photon, int m) const { return n_photon * (atom_number + 1) + m; }
};

/// Hard cap on the basis dimension (ResourceError beyond).
inline constexpr int kDimensionCap = 200000;
/// Largest parity-sector dimension handled by the dense eigensolver;
/// larger sectors go through the Lanczos path.
inline constexpr int kDenseSectorCap = 4096;

struct EDResult {
    double ground_energy{};
    double gap{};               // E1 - E0
    double gap2{};              // E2 - E0 (above threshold the doublet collapses; this tracks omega_-)
    double n_photon_per_N{};    // <a'a> / N
    double sz_per_N{};          // <S_z> / N
    double order_param_beta2{}; // <S_z>/N + 1/2 = <c1'c1>/N, in [0, 1]
    double parity_expectation{};// |<a>|, < 1e-8 for a symmetric ground state
    bool converged{};           // doubling n_max moves E0 by < 1e-8 |E0|
    int photon_cutoff_used{};
};

/// Real symmetric matrix of the rotated Hamiltonian. Couplings only connect
/// n <-> n+-1 together with m <-> m+-1 (parity block structure).
Eigen::SparseMatrix<double> build_hamiltonian(const ReducedParams& r, const SpinPhotonBasis& basis);

/// Same operator without the gauge rotation (complex Hermitian); observables
/// must agree with the rotated form to 1e-10.
Eigen::SparseMatrix<std::complex<double>> build_hamiltonian_unrotated(const ReducedParams& r,
                                                                      const SpinPhotonBasis& basis);

/// Default Fock cutoff rule: max(40, ceil(8 N alpha0^2 + 10 sqrt(N alpha0^2 + 1))).
int default_photon_cutoff(const ReducedParams& r);

/// Lowest eigenpairs (per parity sector), observables in the original gauge,
/// and the cutoff-doubling convergence certificate.
EDResult ground_state_solve(const ReducedParams& r, const SpinPhotonBasis& basis);

/// Lowest-k eigenpairs of a sparse symmetric matrix by Lanczos with full
/// reorthogonalization; deterministic start vector. Used for parity sectors
/// beyond the dense cap.
std::pair<std::vector<double>, Eigen::MatrixXd> lowest_eigenpairs_lanczos(
    const Eigen::SparseMatrix<double>& A, int k, int max_iterations = 600, double tol = 1e-12);

/// Expectation of the two-mode Hamiltonian in the displaced product coherent
/// state (per-atom energy times N); a variational upper bound on ground_energy.
double coherent_state_energy(const ReducedParams& r, long long N, double alpha0, double beta0);

struct ScanRow {
    int atom_number{};
    EDResult result;
    double n_photon_incoherent{}; // <a'a> - N alpha0^2
    double n_atom_incoherent{};   // <c1'c1> - N beta0^2
};

struct FiniteSizeScan {
    std::vector<ScanRow> rows;
    // Linear 1/N -> 0 extrapolations over converged rows (NaN when < 2 usable rows).
    double beta2_extrapolated{};
    double gap_extrapolated{};
    double gap2_extrapolated{};
    double n_photon_incoherent_extrapolated{};
    double n_atom_incoherent_extrapolated{};
};

/// EDResults at fixed reduced couplings for each N, plus 1/N extrapolations.
/// Unconverged rows are kept but excluded from the fits.
FiniteSizeScan finite_size_scan(const ReducedParams& r, std::span<const int> atom_numbers,
                                std::optional<int> photon_cutoff_override = std::nullopt);

} // namespace ed
} // namespace dicke
