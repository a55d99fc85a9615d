#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qcorr/errors.hpp"
#include "qcorr/measure.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

// Periodic transverse-field XY chain
//   H = -(J/2) sum_i [(1+gamma) sx_i sx_{i+1} + (1-gamma) sy_i sy_{i+1}]
//       - h sum_i sz_i
// at zero temperature. gamma = 1 is the transverse-field Ising chain.
struct ChainParams {
    int n_spins = 0;
    double coupling = 1.0;  // J
    double field = 0.0;     // h
    double gamma = 1.0;
};

inline void validate_chain(const ChainParams& p) {
    if (p.n_spins < 4 || p.n_spins % 2 != 0)
        throw parameter_domain_error("chain: n_spins must be even and >= 4, got " +
                                     std::to_string(p.n_spins));
    if (p.field < 0.0) throw parameter_domain_error("chain: field must be >= 0");
    if (p.gamma < 0.0 || p.gamma > 1.0)
        throw parameter_domain_error("chain: gamma must be in [0, 1]");
}

// Translation-invariant ground-state expectation values.
struct CorrelatorSet {
    double mz = 0.0;   // <sz>
    double gxx = 0.0;  // <sx_k sx_{k+1}>
    double gyy = 0.0;  // <sy_k sy_{k+1}>
    double gzz = 0.0;  // <sz_k sz_{k+1}>
};

namespace detail {

// Antiperiodic momenta k = +-(2j+1) pi / N, the even-fermion-parity sector
// of the Jordan-Wigner solution; for even N the set avoids k = 0, pi, so the
// mode energies Lambda_k stay positive for gamma > 0.
inline std::vector<double> antiperiodic_momenta(int n) {
    std::vector<double> ks;
    ks.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n / 2; ++j) {
        const double k = (2.0 * j + 1.0) * M_PI / n;
        ks.push_back(k);
        ks.push_back(-k);
    }
    return ks;
}

inline double mode_energy(const ChainParams& p, double k) {
    const double a = p.coupling * std::cos(k) - p.field;
    const double b = p.coupling * p.gamma * std::sin(k);
    return std::sqrt(a * a + b * b);
}

// Majorana contraction G(r) = <B_j A_{j+r}>:
//   G(r) = (1/N) sum_k [ (J cos k - h) cos(kr) + J gamma sin k sin(kr) ] / Lambda_k.
// Wick's theorem then gives
//   <sz> = -G(0),  <sx sx> = G(1),  <sy sy> = G(-1),
//   <sz sz> = <sz>^2 - G(1) G(-1).
inline double majorana_g(const ChainParams& p, int r) {
    double sum = 0.0;
    for (const double k : antiperiodic_momenta(p.n_spins)) {
        const double lam = mode_energy(p, k);
        if (lam < 1e-300) continue;  // gapless mode contributes symmetrically
        sum += ((p.coupling * std::cos(k) - p.field) * std::cos(k * r) +
                p.coupling * p.gamma * std::sin(k) * std::sin(k * r)) /
               lam;
    }
    return sum / p.n_spins;
}

} // namespace detail

inline CorrelatorSet ground_state_correlators(const ChainParams& p) {
    validate_chain(p);
    CorrelatorSet c;
    const double g0 = detail::majorana_g(p, 0);
    const double gp = detail::majorana_g(p, 1);
    const double gm = detail::majorana_g(p, -1);
    c.mz = -g0;
    c.gxx = gp;
    c.gyy = gm;
    c.gzz = c.mz * c.mz - gp * gm;
    return c;
}

inline double ground_state_energy(const ChainParams& p) {
    validate_chain(p);
    double e = 0.0;
    for (const double k : detail::antiperiodic_momenta(p.n_spins)) e -= detail::mode_energy(p, k);
    return e;
}

// ---------------------------------------------------------------------------
// Exact diagonalization oracle (n_spins <= 12).
//
// Spin basis: bit j of the index is site j, bit value 1 = spin down, so
// sz_j = 1 - 2 b_j. The Hamiltonian conserves the parity of the number of
// down spins; each sector is solved by Lanczos with full
// reorthogonalization and the lower-energy sector wins (ties go to even).

namespace detail {

inline void apply_chain_hamiltonian(const ChainParams& p, const std::vector<double>& v,
                                    std::vector<double>& out) {
    const int n = p.n_spins;
    const long dim = 1L << n;
    const double jx = 0.5 * p.coupling * (1.0 + p.gamma);
    const double jy = 0.5 * p.coupling * (1.0 - p.gamma);
    std::fill(out.begin(), out.end(), 0.0);
    for (long b = 0; b < dim; ++b) {
        const double amp = v[b];
        if (amp == 0.0) continue;
        out[b] += -p.field * (n - 2 * std::popcount(static_cast<std::uint64_t>(b))) * amp;
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            const long flipped = b ^ ((1L << i) | (1L << j));
            const int bi = static_cast<int>((b >> i) & 1), bj = static_cast<int>((b >> j) & 1);
            // sy sy carries -1 on aligned pairs, +1 on anti-aligned ones.
            const double sy_sign = (bi == bj) ? -1.0 : 1.0;
            out[flipped] += -(jx + jy * sy_sign) * amp;
        }
    }
}

// Lowest eigenpair within one down-spin-parity sector.
inline double lanczos_ground(const ChainParams& p, int parity, std::vector<double>& ground) {
    const long dim = 1L << p.n_spins;
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;

    // Deterministic in-sector start vector.
    std::vector<double> q(dim, 0.0);
    {
        SplitMix64 seedgen(0xed5eedULL + static_cast<std::uint64_t>(parity));
        double norm2 = 0.0;
        for (long b = 0; b < dim; ++b) {
            if ((std::popcount(static_cast<std::uint64_t>(b)) & 1) != parity) continue;
            q[b] = seedgen.gaussian();
            norm2 += q[b] * q[b];
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : q) x *= inv;
    }

    const int max_iters = static_cast<int>(std::min<long>(dim / 2, 360));
    std::vector<double> w(dim);
    double prev_ground = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iters; ++it) {
        basis.push_back(q);
        apply_chain_hamiltonian(p, q, w);
        double a = 0.0;
        for (long b = 0; b < dim; ++b) a += q[b] * w[b];
        alpha.push_back(a);
        for (long b = 0; b < dim; ++b) w[b] -= a * q[b];
        if (it > 0)
            for (long b = 0; b < dim; ++b) w[b] -= beta[it - 1] * basis[it - 1][b];
        // Full reorthogonalization, twice.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) {
                double ov = 0.0;
                for (long b = 0; b < dim; ++b) ov += u[b] * w[b];
                for (long b = 0; b < dim; ++b) w[b] -= ov * u[b];
            }
        double nb = 0.0;
        for (long b = 0; b < dim; ++b) nb += w[b] * w[b];
        nb = std::sqrt(nb);
        if (nb < 1e-12) break;  // invariant subspace exhausted
        beta.push_back(nb);
        for (long b = 0; b < dim; ++b) q[b] = w[b] / nb;

        if (it >= 20 && it % 12 == 0) {
            const int k = it + 1;
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) {
                tri(i, i) = alpha[i];
                if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri, Eigen::EigenvaluesOnly);
            const double e0 = es.eigenvalues()(0);
            if (std::abs(e0 - prev_ground) < 1e-14 * (1.0 + std::abs(e0))) break;
            prev_ground = e0;
        }
    }

    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::VectorXd gv = es.eigenvectors().col(0);

    ground.assign(dim, 0.0);
    for (int i = 0; i < k; ++i)
        for (long b = 0; b < dim; ++b) ground[b] += gv(i) * basis[i][b];
    double norm2 = 0.0;
    for (long b = 0; b < dim; ++b) norm2 += ground[b] * ground[b];
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : ground) x *= inv;
    return es.eigenvalues()(0);
}

} // namespace detail

struct EdSolution {
    double energy = 0.0;
    int parity = 0;
    CorrelatorSet correlators;
    DensityMatrix rdm01;  // two-site reduced state of the bond (1, 2)
};

inline EdSolution exact_diag_solve(const ChainParams& p) {
    validate_chain(p);
    if (p.n_spins > 12)
        throw parameter_domain_error("exact_diag_solve: n_spins must be <= 12, got " +
                                     std::to_string(p.n_spins));
    std::vector<double> even, odd;
    const double e_even = detail::lanczos_ground(p, 0, even);
    const double e_odd = detail::lanczos_ground(p, 1, odd);

    EdSolution sol;
    sol.parity = (e_odd < e_even - 1e-12) ? 1 : 0;
    sol.energy = sol.parity == 1 ? e_odd : e_even;
    const std::vector<double>& psi = sol.parity == 1 ? odd : even;

    const int n = p.n_spins;
    const long dim = 1L << n;
    double mz = 0.0, gxx = 0.0, gyy = 0.0, gzz = 0.0;
    for (long b = 0; b < dim; ++b) {
        if (psi[b] == 0.0) continue;
        const double w = psi[b] * psi[b];
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            const double szi = 1.0 - 2.0 * ((b >> i) & 1);
            const double szj = 1.0 - 2.0 * ((b >> j) & 1);
            mz += w * szi;
            gzz += w * szi * szj;
            const long flipped = b ^ ((1L << i) | (1L << j));
            const double cross = psi[b] * psi[flipped];
            const double sy_sign = (((b >> i) & 1) == ((b >> j) & 1)) ? -1.0 : 1.0;
            gxx += cross;
            gyy += sy_sign * cross;
        }
    }
    sol.correlators = {mz / n, gxx / n, gyy / n, gzz / n};

    // Direct two-site reduced density matrix of sites 0, 1 (bits 0 and 1).
    Eigen::MatrixXcd rdm = Eigen::MatrixXcd::Zero(4, 4);
    for (long rest = 0; rest < (1L << (n - 2)); ++rest)
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                const long ia = (rest << 2) | a;
                const long ic = (rest << 2) | c;
                // site 0 is bit 0 but the leftmost tensor factor, so the
                // composite row index swaps the two bits.
                const int ra = ((a & 1) << 1) | ((a >> 1) & 1);
                const int rc = ((c & 1) << 1) | ((c >> 1) & 1);
                rdm(ra, rc) += psi[ia] * psi[ic];
            }
    sol.rdm01 = {{2, 2}, std::move(rdm)};
    return sol;
}

inline CorrelatorSet exact_diag_oracle(const ChainParams& p) { return exact_diag_solve(p).correlators; }

// X-shaped two-site state assembled from the translation-invariant
// correlators:
//   rho = (1/4) [ I x I + mz (sz x I + I x sz) + sum_a g_aa (s_a x s_a) ].
inline DensityMatrix two_site_rdm(const CorrelatorSet& c) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = (1.0 + 2.0 * c.mz + c.gzz) / 4.0;
    m(1, 1) = m(2, 2) = (1.0 - c.gzz) / 4.0;
    m(3, 3) = (1.0 - 2.0 * c.mz + c.gzz) / 4.0;
    m(0, 3) = m(3, 0) = (c.gxx - c.gyy) / 4.0;
    m(1, 2) = m(2, 1) = (c.gxx + c.gyy) / 4.0;
    DensityMatrix rho{{2, 2}, std::move(m)};
    validate(rho);
    return rho;
}

// Total-correlation sweep of the nearest-neighbor reduced state over a field
// grid, with central-difference derivatives on the interior points.
struct ScanSeries {
    std::vector<double> h_grid;
    std::vector<double> q_values;
    std::vector<double> dq_dh;  // size h_grid.size() - 2
};

inline ScanSeries scan(const ChainParams& base, const std::vector<double>& h_grid,
                       Variant variant = Variant::plain) {
    if (h_grid.size() < 5) throw parameter_domain_error("scan: need at least 5 grid points");
    for (std::size_t i = 1; i < h_grid.size(); ++i)
        if (!(h_grid[i] > h_grid[i - 1]))
            throw parameter_domain_error("scan: grid must be strictly increasing");

    ScanSeries s;
    s.h_grid = h_grid;
    s.q_values.reserve(h_grid.size());
    for (const double h : h_grid) {
        ChainParams p = base;
        p.field = h;
        const DensityMatrix rho = two_site_rdm(ground_state_correlators(p));
        s.q_values.push_back(total_correlation_max(rho, variant).total(variant));
    }
    s.dq_dh.resize(h_grid.size() - 2);
    for (std::size_t i = 1; i + 1 < h_grid.size(); ++i)
        s.dq_dh[i - 1] = (s.q_values[i + 1] - s.q_values[i - 1]) / (h_grid[i + 1] - h_grid[i - 1]);
    return s;
}

struct PeakInfo {
    double h = 0.0;
    double magnitude = 0.0;
    int grid_index = 0;  // index into h_grid
};

// Largest |dq/dh| over the interior grid points; ties keep the smallest h.
inline PeakInfo locate_peak(const ScanSeries& s) {
    if (s.dq_dh.empty()) throw no_peak_error("locate_peak: empty derivative series");
    PeakInfo best;
    bool any = false;
    for (std::size_t i = 0; i < s.dq_dh.size(); ++i) {
        const double mag = std::abs(s.dq_dh[i]);
        if (!any || mag > best.magnitude) {
            best.magnitude = mag;
            best.grid_index = static_cast<int>(i + 1);
            best.h = s.h_grid[i + 1];
            any = true;
        }
    }
    if (best.magnitude == 0.0) throw no_peak_error("locate_peak: derivative is identically zero");
    return best;
}

} // namespace qcorr
