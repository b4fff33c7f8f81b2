#include "dicke/ed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dicke/meanfield.hpp"

namespace dicke {
namespace ed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Deterministic start vector entries (64-bit LCG, platform-independent).
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed) {}
    double next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state_ >> 11) * 0x1.0p-53 - 0.5;
    }
private:
    std::uint64_t state_;
};

} // namespace

SpinPhotonBasis::SpinPhotonBasis(int N, int n_max) : atom_number(N), photon_cutoff(n_max) {
    if (N < 1) throw RegimeError("SpinPhotonBasis: atom number N must be >= 1");
    if (n_max < 1) throw ConfigError("SpinPhotonBasis: photon cutoff must be >= 1");
    const long long dim = static_cast<long long>(N + 1) * (n_max + 1);
    if (dim > kDimensionCap) {
        std::ostringstream msg;
        msg << "SpinPhotonBasis: dimension " << dim << " exceeds the cap " << kDimensionCap;
        throw ResourceError(msg.str());
    }
}

namespace {

// Ladder factor sqrt((N-m)(m+1)) for m -> m+1, exact integer product.
double spin_raise(long long N, long long m) {
    return std::sqrt(static_cast<double>((N - m) * (m + 1)));
}

template <typename Scalar, typename PhotonUp, typename PhotonDown>
Eigen::SparseMatrix<Scalar> build_matrix(const ReducedParams& r, const SpinPhotonBasis& basis,
                                         PhotonUp up_coeff, PhotonDown down_coeff) {
    check_reduced(r);
    const int N = basis.atom_number;
    const int nmax = basis.photon_cutoff;
    const double Nd = static_cast<double>(N);
    const double g = r.y / std::sqrt(Nd);  // coupling per sqrt(N), times S_x matrix elements

    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(static_cast<std::size_t>(basis.dimension()) * 5);
    for (int n = 0; n <= nmax; ++n) {
        for (int m = 0; m <= N; ++m) {
            const int i = basis.index(n, m);
            const double sz = m - 0.5 * Nd;
            const double diag = -r.delta_C * n + r.omega_R * sz + r.u * n * (0.5 + sz / Nd);
            trip.emplace_back(i, i, Scalar(diag));
            if (m < N) {
                const double sx = 0.5 * spin_raise(N, m);   // <m+1| S_x |m>
                if (n < nmax) trip.emplace_back(basis.index(n + 1, m + 1), i, up_coeff(g * sx, n));
                if (n > 0) trip.emplace_back(basis.index(n - 1, m + 1), i, down_coeff(g * sx, n));
            }
            if (m > 0) {
                const double sx = 0.5 * spin_raise(N, m - 1);  // <m-1| S_x |m>
                if (n < nmax) trip.emplace_back(basis.index(n + 1, m - 1), i, up_coeff(g * sx, n));
                if (n > 0) trip.emplace_back(basis.index(n - 1, m - 1), i, down_coeff(g * sx, n));
            }
        }
    }
    Eigen::SparseMatrix<Scalar> H(basis.dimension(), basis.dimension());
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

} // namespace

Eigen::SparseMatrix<double> build_hamiltonian(const ReducedParams& r, const SpinPhotonBasis& basis) {
    // Rotated gauge a -> i a: the coupling i y (a'-a) S_x becomes y (a'+a) S_x.
    const auto up = [](double c, int n) { return c * std::sqrt(n + 1.0); };
    const auto down = [](double c, int n) { return c * std::sqrt(static_cast<double>(n)); };
    return build_matrix<double>(r, basis, up, down);
}

Eigen::SparseMatrix<std::complex<double>> build_hamiltonian_unrotated(const ReducedParams& r,
                                                                      const SpinPhotonBasis& basis) {
    using C = std::complex<double>;
    const auto up = [](double c, int n) { return C(0.0, c * std::sqrt(n + 1.0)); };    // +i a'
    const auto down = [](double c, int n) { return C(0.0, -c * std::sqrt(static_cast<double>(n))); };
    return build_matrix<C>(r, basis, up, down);
}

int default_photon_cutoff(const ReducedParams& r) {
    if (!r.atom_number) {
        throw ConfigError("default_photon_cutoff: atom number N is required");
    }
    const MeanFieldSolution s = solve_displacements(r);
    const double na = static_cast<double>(*r.atom_number) * s.alpha0 * s.alpha0;
    return std::max(40, static_cast<int>(std::ceil(8.0 * na + 10.0 * std::sqrt(na + 1.0))));
}

std::pair<std::vector<double>, Eigen::MatrixXd> lowest_eigenpairs_lanczos(
    const Eigen::SparseMatrix<double>& A, int k, int max_iterations, double tol) {
    const int dim = static_cast<int>(A.rows());
    if (k < 1 || k > dim) throw ConfigError("lowest_eigenpairs_lanczos: bad pair count");
    max_iterations = std::min(max_iterations, dim);

    Lcg rng(0x9e3779b97f4a7c15ULL);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.next();
    v.normalize();

    std::vector<Eigen::VectorXd> basis{v};
    std::vector<double> alpha, beta;

    for (int j = 0; j < max_iterations; ++j) {
        Eigen::VectorXd w = A * basis[j];
        if (j > 0) w -= beta[j - 1] * basis[j - 1];
        const double a = basis[j].dot(w);
        alpha.push_back(a);
        w -= a * basis[j];
        for (int pass = 0; pass < 2; ++pass) {            // full reorthogonalization
            for (const auto& q : basis) w -= q.dot(w) * q;
        }
        const double b = w.norm();

        const int msize = static_cast<int>(alpha.size());
        if (msize >= k) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(msize, msize);
            for (int i = 0; i < msize; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < msize) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
            const double scale = std::max(1.0, std::abs(tes.eigenvalues()[0]));
            bool converged = true;
            for (int e = 0; e < k; ++e) {
                const double resid = b * std::abs(tes.eigenvectors()(msize - 1, e));
                if (resid > tol * scale) { converged = false; break; }
            }
            if (converged || b < 1e-14 * scale || msize == dim) {
                std::vector<double> ritz(tes.eigenvalues().data(), tes.eigenvalues().data() + k);
                Eigen::MatrixXd vecs(dim, k);
                vecs.setZero();
                for (int e = 0; e < k; ++e) {
                    for (int i = 0; i < msize; ++i) vecs.col(e) += tes.eigenvectors()(i, e) * basis[i];
                    vecs.col(e).normalize();
                }
                return {ritz, vecs};
            }
        }
        if (b < 1e-14) {
            // invariant subspace exhausted before convergence; restart direction
            Eigen::VectorXd fresh(dim);
            for (int i = 0; i < dim; ++i) fresh[i] = rng.next();
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : basis) fresh -= q.dot(fresh) * q;
            }
            const double fn = fresh.norm();
            if (fn < 1e-14) break;
            beta.push_back(0.0);
            basis.push_back(fresh / fn);
        } else {
            beta.push_back(b);
            basis.push_back(w / b);
        }
    }
    throw NumericalError("lowest_eigenpairs_lanczos: no convergence within the iteration budget");
}

namespace {

struct SectorSolve {
    std::vector<double> values;   // lowest few, ascending
    Eigen::VectorXd ground_full;  // ground vector embedded in the full basis
};

SectorSolve solve_sector(const Eigen::SparseMatrix<double>& H, const std::vector<int>& indices,
                         int dim_full, int want) {
    const int sdim = static_cast<int>(indices.size());
    SectorSolve out;
    if (sdim == 0) return out;

    std::vector<int> pos(dim_full, -1);
    for (int s = 0; s < sdim; ++s) pos[indices[s]] = s;

    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < H.outerSize(); ++col) {
        if (pos[col] < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(H, col); it; ++it) {
            const int prow = pos[it.row()];
            if (prow < 0) {
                throw NumericalError("solve_sector: coupling crosses the parity block structure");
            }
            trip.emplace_back(prow, pos[col], it.value());
        }
    }
    Eigen::SparseMatrix<double> Hs(sdim, sdim);
    Hs.setFromTriplets(trip.begin(), trip.end());

    const int k = std::min(want, sdim);
    Eigen::VectorXd ground(sdim);
    if (sdim <= kDenseSectorCap) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(Hs)};
        if (es.info() != Eigen::Success) {
            throw NumericalError("solve_sector: dense eigensolver failed");
        }
        out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
        ground = es.eigenvectors().col(0);
    } else {
        auto [vals, vecs] = lowest_eigenpairs_lanczos(Hs, k);
        out.values = std::move(vals);
        ground = vecs.col(0);
    }
    out.ground_full = Eigen::VectorXd::Zero(dim_full);
    for (int s = 0; s < sdim; ++s) out.ground_full[indices[s]] = ground[s];
    return out;
}

struct SpectrumSlice {
    double e0{}, e1{}, e2{};
    Eigen::VectorXd ground;
};

SpectrumSlice lowest_states(const ReducedParams& r, const SpinPhotonBasis& basis) {
    const auto H = build_hamiltonian(r, basis);
    std::vector<int> even, odd;
    for (int n = 0; n <= basis.photon_cutoff; ++n) {
        for (int m = 0; m <= basis.atom_number; ++m) {
            ((n + m) % 2 == 0 ? even : odd).push_back(basis.index(n, m));
        }
    }
    const auto se = solve_sector(H, even, basis.dimension(), 3);
    const auto so = solve_sector(H, odd, basis.dimension(), 3);

    std::vector<std::pair<double, int>> merged;  // (energy, sector)
    for (double v : se.values) merged.emplace_back(v, 0);
    for (double v : so.values) merged.emplace_back(v, 1);
    std::sort(merged.begin(), merged.end());
    if (merged.size() < 3) {
        throw NumericalError("lowest_states: basis too small for a three-level slice");
    }
    SpectrumSlice slice;
    slice.e0 = merged[0].first;
    slice.e1 = merged[1].first;
    slice.e2 = merged[2].first;
    slice.ground = (merged[0].second == 0) ? se.ground_full : so.ground_full;
    return slice;
}

struct Observables {
    double n_photon{}, sz{}, a_abs{};
};

Observables measure(const Eigen::VectorXd& psi, const SpinPhotonBasis& basis) {
    Observables obs;
    const int N = basis.atom_number;
    double a_rot = 0.0;
    for (int n = 0; n <= basis.photon_cutoff; ++n) {
        for (int m = 0; m <= N; ++m) {
            const double c = psi[basis.index(n, m)];
            obs.n_photon += c * c * n;
            obs.sz += c * c * (m - 0.5 * N);
            if (n < basis.photon_cutoff) {
                a_rot += psi[basis.index(n + 1, m)] * c * std::sqrt(n + 1.0);
            }
        }
    }
    obs.a_abs = std::abs(a_rot);  // |<a>| is gauge invariant
    return obs;
}

} // namespace

EDResult ground_state_solve(const ReducedParams& r, const SpinPhotonBasis& basis) {
    const auto slice = lowest_states(r, basis);
    const auto obs = measure(slice.ground, basis);
    const double Nd = static_cast<double>(basis.atom_number);

    EDResult res;
    res.ground_energy = slice.e0;
    res.gap = slice.e1 - slice.e0;
    res.gap2 = slice.e2 - slice.e0;
    res.n_photon_per_N = obs.n_photon / Nd;
    res.sz_per_N = obs.sz / Nd;
    res.order_param_beta2 = obs.sz / Nd + 0.5;
    res.parity_expectation = obs.a_abs;
    res.photon_cutoff_used = basis.photon_cutoff;

    // Convergence certificate: re-solve with the photon cutoff doubled.
    const long long doubled =
        static_cast<long long>(basis.atom_number + 1) * (2 * basis.photon_cutoff + 1);
    if (doubled <= kDimensionCap) {
        const SpinPhotonBasis big(basis.atom_number, 2 * basis.photon_cutoff);
        const double e_big = lowest_states(r, big).e0;
        res.converged =
            std::abs(e_big - res.ground_energy) < 1e-8 * std::max(std::abs(res.ground_energy), 1e-300);
    } else {
        res.converged = false;  // cannot certify within the resource cap
    }
    return res;
}

double coherent_state_energy(const ReducedParams& r, long long N, double alpha0, double beta0) {
    const ReducedParams n = r.normalized();
    const double b2 = beta0 * beta0;
    const double e_per_atom = -n.delta_C * alpha0 * alpha0 + (b2 - 0.5) +
                              2.0 * n.y * alpha0 * beta0 * std::sqrt(1.0 - b2) +
                              n.u * alpha0 * alpha0 * b2;
    return r.omega_R * static_cast<double>(N) * e_per_atom;
}

namespace {

double extrapolate_to_zero(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 2) return kNaN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : xy) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
    const double n = static_cast<double>(xy.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return (sy - slope * sx) / n;  // intercept at 1/N = 0
}

} // namespace

FiniteSizeScan finite_size_scan(const ReducedParams& r, std::span<const int> atom_numbers,
                                std::optional<int> photon_cutoff_override) {
    if (atom_numbers.empty()) {
        throw ConfigError("finite_size_scan: empty atom-number list");
    }
    const MeanFieldSolution mf = solve_displacements(r);

    FiniteSizeScan scan;
    std::vector<std::pair<double, double>> beta2_fit, gap_fit, gap2_fit, nph_fit, nat_fit;
    for (int N : atom_numbers) {
        ReducedParams rn = r;
        rn.atom_number = N;
        const int cutoff = photon_cutoff_override.value_or(default_photon_cutoff(rn));
        const SpinPhotonBasis basis(N, cutoff);
        ScanRow row;
        row.atom_number = N;
        row.result = ground_state_solve(rn, basis);
        const double Nd = static_cast<double>(N);
        row.n_photon_incoherent = Nd * row.result.n_photon_per_N - Nd * mf.alpha0 * mf.alpha0;
        row.n_atom_incoherent = Nd * row.result.order_param_beta2 - Nd * mf.beta0 * mf.beta0;
        if (row.result.converged) {
            const double x = 1.0 / Nd;
            beta2_fit.emplace_back(x, row.result.order_param_beta2);
            gap_fit.emplace_back(x, row.result.gap);
            gap2_fit.emplace_back(x, row.result.gap2);
            nph_fit.emplace_back(x, row.n_photon_incoherent);
            nat_fit.emplace_back(x, row.n_atom_incoherent);
        }
        scan.rows.push_back(std::move(row));
    }
    scan.beta2_extrapolated = extrapolate_to_zero(beta2_fit);
    scan.gap_extrapolated = extrapolate_to_zero(gap_fit);
    scan.gap2_extrapolated = extrapolate_to_zero(gap2_fit);
    scan.n_photon_incoherent_extrapolated = extrapolate_to_zero(nph_fit);
    scan.n_atom_incoherent_extrapolated = extrapolate_to_zero(nat_fit);
    return scan;
}

} // namespace ed
} // namespace dicke
