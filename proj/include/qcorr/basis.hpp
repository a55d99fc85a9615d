#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcorr/errors.hpp"

namespace qcorr {

// Generalized Gell-Mann generators of SU(d): traceless Hermitian matrices
// with Tr(l_i l_j) = 2 delta_ij, in a canonical order frozen project-wide:
//
//   1. symmetric pair matrices      E_jk + E_kj        for j < k, lexicographic
//   2. antisymmetric pair matrices  -i (E_jk - E_kj)   same pair order
//   3. diagonal matrices  sqrt(2/(l(l+1))) (E_00 + ... + E_{l-1,l-1} - l E_ll)
//      for l = 1 .. d-1
//
// Correlation-matrix rows and projector coordinates elsewhere in the library
// are indexed against exactly this order. For d = 2 this gives the Pauli
// matrices (sigma_x, sigma_y, sigma_z).
struct GeneratorSet {
    int dim = 0;
    std::vector<Eigen::MatrixXcd> generators;  // d^2 - 1 matrices
};

// {X_0 = I/sqrt(d), X_i = lambda_i/sqrt(2)}: orthonormal Hermitian operator
// basis, Tr(X_i X_j) = delta_ij.
struct OrthonormalBasis {
    int dim = 0;
    std::vector<Eigen::MatrixXcd> elements;  // d^2 matrices
};

inline void check_basis_dim(int d, const char* who) {
    if (d < 2 || d > 16)
        throw invalid_dimension_error(std::string(who) + ": dimension must be in [2, 16], got " +
                                      std::to_string(d));
}

inline GeneratorSet gellmann_generators(int d) {
    check_basis_dim(d, "gellmann_generators");
    GeneratorSet out;
    out.dim = d;
    out.generators.reserve(static_cast<std::size_t>(d) * d - 1);
    const std::complex<double> iu(0.0, 1.0);
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
            m(j, k) = 1.0;
            m(k, j) = 1.0;
            out.generators.push_back(std::move(m));
        }
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
            m(j, k) = -iu;
            m(k, j) = iu;
            out.generators.push_back(std::move(m));
        }
    for (int l = 1; l < d; ++l) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
        const double s = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int j = 0; j < l; ++j) m(j, j) = s;
        m(l, l) = -s * static_cast<double>(l);
        out.generators.push_back(std::move(m));
    }
    return out;
}

inline OrthonormalBasis orthonormal_basis(int d) {
    check_basis_dim(d, "orthonormal_basis");
    OrthonormalBasis out;
    out.dim = d;
    out.elements.reserve(static_cast<std::size_t>(d) * d);
    out.elements.push_back(Eigen::MatrixXcd::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    const GeneratorSet gen = gellmann_generators(d);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& g : gen.generators) out.elements.push_back(g * inv_sqrt2);
    return out;
}

} // namespace qcorr
