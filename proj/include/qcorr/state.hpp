#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qcorr/errors.hpp"

namespace qcorr {

// Validation tolerances, frozen project-wide.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-10;

// Density matrix of an m-partite system. dims lists the subsystem dimensions
// left to right; composite indices are row-major, i.e. the leftmost factor is
// the most significant digit, matching the Kronecker product order
// kron(A_1, ..., A_m).
struct DensityMatrix {
    std::vector<int> dims;
    Eigen::MatrixXcd matrix;

    int num_subsystems() const { return static_cast<int>(dims.size()); }
    int total_dim() const {
        int d = 1;
        for (int v : dims) d *= v;
        return d;
    }
};

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Checks the three state invariants and throws the matching error type:
// hermiticity (1e-10 entrywise), unit trace (1e-10), spectrum >= -1e-10.
inline void validate(const DensityMatrix& rho) {
    if (rho.dims.empty()) throw invalid_dimension_error("validate: empty dimension list");
    for (int d : rho.dims)
        if (d < 2 || d > 16)
            throw invalid_dimension_error("validate: subsystem dimension " + std::to_string(d) +
                                          " outside [2, 16]");
    const int d = rho.total_dim();
    if (rho.matrix.rows() != d || rho.matrix.cols() != d)
        throw invalid_dimension_error("validate: matrix is " + std::to_string(rho.matrix.rows()) +
                                      "x" + std::to_string(rho.matrix.cols()) + ", expected " +
                                      std::to_string(d) + "x" + std::to_string(d));
    const double herm = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol)
        throw hermiticity_error("validate: non-Hermitian, max |rho - rho^dag| = " +
                                std::to_string(herm));
    const std::complex<double> tr = rho.matrix.trace();
    if (std::abs(tr - std::complex<double>(1.0, 0.0)) > kTraceTol)
        throw trace_error("validate: trace = " + std::to_string(tr.real()) + " + " +
                          std::to_string(tr.imag()) + "i, expected 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < kEigenvalueFloor)
        throw positivity_error("validate: minimum eigenvalue " + std::to_string(lmin));
}

// Tr(rho^2); equals the squared Frobenius norm for Hermitian input.
inline double purity(const DensityMatrix& rho) { return rho.matrix.squaredNorm(); }

// Reduced state on the kept subsystems (1-based indices, any order; the
// result keeps the original left-to-right ordering).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
    const int m = rho.num_subsystems();
    if (keep.empty()) throw invalid_subsystem_error("partial_trace: empty keep set");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int k : keep)
        if (k < 1 || k > m)
            throw invalid_subsystem_error("partial_trace: subsystem index " + std::to_string(k) +
                                          " outside 1.." + std::to_string(m));

    std::vector<int> kept_dims, traced_dims, kept_pos, traced_pos;
    for (int s = 0; s < m; ++s) {
        if (std::binary_search(keep.begin(), keep.end(), s + 1)) {
            kept_dims.push_back(rho.dims[s]);
            kept_pos.push_back(s);
        } else {
            traced_dims.push_back(rho.dims[s]);
            traced_pos.push_back(s);
        }
    }

    std::vector<long> stride(m);
    long acc = 1;
    for (int s = m - 1; s >= 0; --s) {
        stride[s] = acc;
        acc *= rho.dims[s];
    }

    long dk = 1;
    for (int v : kept_dims) dk *= v;
    long dt = 1;
    for (int v : traced_dims) dt *= v;

    // Composite offset of a flat kept/traced index in the full index space.
    auto offset_of = [&](long flat, const std::vector<int>& dims_part,
                         const std::vector<int>& pos_part) {
        long off = 0;
        for (int s = static_cast<int>(dims_part.size()) - 1; s >= 0; --s) {
            off += (flat % dims_part[s]) * stride[pos_part[s]];
            flat /= dims_part[s];
        }
        return off;
    };

    std::vector<long> kept_off(dk), traced_off(dt);
    for (long i = 0; i < dk; ++i) kept_off[i] = offset_of(i, kept_dims, kept_pos);
    for (long i = 0; i < dt; ++i) traced_off[i] = offset_of(i, traced_dims, traced_pos);

    DensityMatrix out;
    out.dims = kept_dims;
    out.matrix = Eigen::MatrixXcd::Zero(dk, dk);
    for (long a = 0; a < dk; ++a)
        for (long b = 0; b < dk; ++b) {
            std::complex<double> sum = 0.0;
            for (long c = 0; c < dt; ++c)
                sum += rho.matrix(kept_off[a] + traced_off[c], kept_off[b] + traced_off[c]);
            out.matrix(a, b) = sum;
        }
    return out;
}

} // namespace qcorr
