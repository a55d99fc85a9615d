#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "qcorr/correlation.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/state.hpp"
#include "qcorr/tensor.hpp"

namespace qcorr {

// Brute-force minimization of ||T - P T||_2^2 over rank-(d-1) projectors,
// independent of the eigenvalue identity used by subsystem_correlation.
// Starts are random orthonormal frames from Gaussian QR; the best start is
// refined by random Givens rotations with geometrically decaying angle
// (pi/8 start, 0.95 decay). Returns the smallest objective seen.
inline double brute_force_projector_min(const CoefficientTensor& C, int s,
                                        Variant variant = Variant::plain, int samples = 200,
                                        int refine_iters = 500, std::uint64_t seed = 1) {
    if (samples < 1) throw parameter_domain_error("brute_force_projector_min: samples >= 1");
    const double purity_c = complement_purity(C, s);
    const CorrelationMatrix corr =
        correlation_matrix(C, s, variant, variant == Variant::mu ? purity_c : 1.0);
    const Eigen::MatrixXd& T = corr.matrix;
    const int n = static_cast<int>(T.rows());
    const int r = C.dims[s - 1] - 1;
    const double total = T.squaredNorm();

    // ||(I - V V^t) T||^2 = ||T||^2 - ||V^t T||^2 for an orthonormal frame V.
    auto objective = [&](const Eigen::MatrixXd& V) { return total - (V.transpose() * T).squaredNorm(); };

    SplitMix64 rng(seed);
    Eigen::MatrixXd best_v = random_orthonormal(n, r, rng);
    double best = objective(best_v);
    for (int k = 1; k < samples; ++k) {
        const Eigen::MatrixXd v = random_orthonormal(n, r, rng);
        const double val = objective(v);
        if (val < best) {
            best = val;
            best_v = v;
        }
    }

    double angle = M_PI / 8.0;
    for (int k = 0; k < refine_iters; ++k, angle *= 0.95) {
        const int i = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1));
        if (j >= i) ++j;
        const double theta = angle * (2.0 * rng.uniform() - 1.0);
        Eigen::MatrixXd v = best_v;
        const Eigen::VectorXd row_i = v.row(i);
        const Eigen::VectorXd row_j = v.row(j);
        v.row(i) = std::cos(theta) * row_i - std::sin(theta) * row_j;
        v.row(j) = std::sin(theta) * row_i + std::cos(theta) * row_j;
        const double val = objective(v);
        if (val < best) {
            best = val;
            best_v = v;
        }
    }
    return best;
}

// Geometric discord of a qubit-anything state by direct minimization of
// ||rho - Pi^A(rho)||_2^2 over von Neumann measurements on A, parameterized
// by the Bloch direction of the measurement basis. For unit n and
// M = n . sigma, the post-measurement state is (rho + (M x I) rho (M x I))/2,
// so the objective is ||rho - (M x I) rho (M x I)||^2 / 4. Dense sphere grid
// plus decaying-step local refinement from the best grid points.
inline double geometric_discord_qubit_oracle(const DensityMatrix& rho, int polar_steps = 48,
                                             int azimuth_steps = 96, int refine_iters = 400,
                                             std::uint64_t seed = 7) {
    if (rho.num_subsystems() != 2 || rho.dims[0] != 2)
        throw invalid_dimension_error("geometric_discord_qubit_oracle: first subsystem must be a qubit");
    const int db = rho.dims[1];
    const long D = 2L * db;

    auto objective = [&](const Eigen::Vector3d& n) {
        Eigen::Matrix2cd M;
        M << std::complex<double>(n(2), 0.0), std::complex<double>(n(0), -n(1)),
            std::complex<double>(n(0), n(1)), std::complex<double>(-n(2), 0.0);
        Eigen::MatrixXcd MI = Eigen::MatrixXcd::Zero(D, D);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                MI.block(static_cast<long>(i) * db, static_cast<long>(j) * db, db, db) =
                    M(i, j) * Eigen::MatrixXcd::Identity(db, db);
        const Eigen::MatrixXcd diff = rho.matrix - MI * rho.matrix * MI;
        return 0.25 * diff.squaredNorm();
    };

    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_n(0, 0, 1);
    for (int a = 0; a <= polar_steps; ++a) {
        const double theta = M_PI * a / polar_steps;
        for (int b = 0; b < azimuth_steps; ++b) {
            const double phi = 2.0 * M_PI * b / azimuth_steps;
            const Eigen::Vector3d n(std::sin(theta) * std::cos(phi),
                                    std::sin(theta) * std::sin(phi), std::cos(theta));
            const double val = objective(n);
            if (val < best) {
                best = val;
                best_n = n;
            }
        }
    }

    SplitMix64 rng(seed);
    double step = M_PI / polar_steps;
    for (int k = 0; k < refine_iters; ++k, step *= 0.97) {
        Eigen::Vector3d n = best_n + step * Eigen::Vector3d(rng.gaussian(), rng.gaussian(),
                                                            rng.gaussian());
        const double len = n.norm();
        if (len < 1e-12) continue;
        n /= len;
        const double val = objective(n);
        if (val < best) {
            best = val;
            best_n = n;
        }
    }
    return best;
}

} // namespace qcorr
