#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcorr/basis.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

// Real expansion coefficients C_{i_1...i_m} of a state over the orthonormal
// Hermitian basis products X_{i_1} x ... x X_{i_m}. Stored flat, row-major
// over the multi-index, each i_s running through 0 .. d_s^2 - 1.
struct CoefficientTensor {
    std::vector<int> dims;       // subsystem Hilbert-space dimensions d_s
    std::vector<double> coeffs;

    int num_subsystems() const { return static_cast<int>(dims.size()); }

    // d_s^2 per subsystem: the index range along axis s.
    std::vector<int> index_sizes() const {
        std::vector<int> k(dims.size());
        for (std::size_t s = 0; s < dims.size(); ++s) k[s] = dims[s] * dims[s];
        return k;
    }

    std::vector<long> strides() const {
        const auto k = index_sizes();
        std::vector<long> st(k.size());
        long acc = 1;
        for (int s = static_cast<int>(k.size()) - 1; s >= 0; --s) {
            st[s] = acc;
            acc *= k[s];
        }
        return st;
    }

    long size() const {
        long n = 1;
        for (int d : dims) n *= static_cast<long>(d) * d;
        return n;
    }
};

namespace detail {

// Digit tables for composite Hilbert indices: digit_of[s][a] is the index of
// subsystem s within composite index a.
inline std::vector<std::vector<int>> hilbert_digits(const std::vector<int>& dims) {
    const int m = static_cast<int>(dims.size());
    long total = 1;
    for (int d : dims) total *= d;
    std::vector<std::vector<int>> dig(m, std::vector<int>(total));
    for (long a = 0; a < total; ++a) {
        long rem = a;
        for (int s = m - 1; s >= 0; --s) {
            dig[s][a] = static_cast<int>(rem % dims[s]);
            rem /= dims[s];
        }
    }
    return dig;
}

inline std::vector<OrthonormalBasis> all_bases(const std::vector<int>& dims) {
    std::vector<OrthonormalBasis> b;
    b.reserve(dims.size());
    for (int d : dims) b.push_back(orthonormal_basis(d));
    return b;
}

} // namespace detail

// C_{i_1...i_m} = Tr[(X_{i_1} x ... x X_{i_m}) rho]. Imaginary residues stay
// below 1e-10 for Hermitian input and are dropped.
inline CoefficientTensor coefficient_tensor(const DensityMatrix& rho) {
    const int m = rho.num_subsystems();
    const long D = rho.total_dim();
    const auto bases = detail::all_bases(rho.dims);
    const auto dig = detail::hilbert_digits(rho.dims);

    CoefficientTensor C;
    C.dims = rho.dims;
    C.coeffs.assign(static_cast<std::size_t>(C.size()), 0.0);

    const auto sizes = C.index_sizes();
    std::vector<int> idx(m, 0);
    for (long flat = 0; flat < C.size(); ++flat) {
        std::complex<double> sum = 0.0;
        for (long a = 0; a < D; ++a)
            for (long b = 0; b < D; ++b) {
                std::complex<double> w = rho.matrix(b, a);
                for (int s = 0; s < m; ++s) w *= bases[s].elements[idx[s]](dig[s][a], dig[s][b]);
                sum += w;
            }
        C.coeffs[flat] = sum.real();
        for (int s = m - 1; s >= 0; --s) {
            if (++idx[s] < sizes[s]) break;
            idx[s] = 0;
        }
    }
    return C;
}

// rho = sum_i C_i X_{i_1} x ... x X_{i_m}. Hermitian with unit trace by
// construction; positivity is not guaranteed for projected tensors, so no
// validation is performed here.
inline DensityMatrix reconstruct(const CoefficientTensor& C) {
    const int m = C.num_subsystems();
    long D = 1;
    for (int d : C.dims) D *= d;
    const auto bases = detail::all_bases(C.dims);
    const auto dig = detail::hilbert_digits(C.dims);
    const auto sizes = C.index_sizes();

    DensityMatrix rho;
    rho.dims = C.dims;
    rho.matrix = Eigen::MatrixXcd::Zero(D, D);

    std::vector<int> idx(m, 0);
    for (long flat = 0; flat < C.size(); ++flat) {
        const double c = C.coeffs[flat];
        if (c != 0.0) {
            for (long a = 0; a < D; ++a)
                for (long b = 0; b < D; ++b) {
                    std::complex<double> w = c;
                    for (int s = 0; s < m; ++s)
                        w *= bases[s].elements[idx[s]](dig[s][a], dig[s][b]);
                    rho.matrix(a, b) += w;
                }
        }
        for (int s = m - 1; s >= 0; --s) {
            if (++idx[s] < sizes[s]) break;
            idx[s] = 0;
        }
    }
    return rho;
}

// Purity of the reduced state left after tracing out subsystem s (1-based),
// read directly off the tensor: tracing out A_s keeps the i_s = 0 slice
// scaled by sqrt(d_s), and orthonormality turns Tr(sigma^2) into the
// coefficient square sum.
inline double complement_purity(const CoefficientTensor& C, int s) {
    const int m = C.num_subsystems();
    if (s < 1 || s > m)
        throw invalid_subsystem_error("complement_purity: subsystem " + std::to_string(s));
    const auto sizes = C.index_sizes();
    const auto strides = C.strides();
    const int axis = s - 1;

    double sum = 0.0;
    std::vector<int> idx(m, 0);
    long off = 0;
    // Walk the i_s = 0 slice with an odometer over the other axes.
    while (true) {
        sum += C.coeffs[off] * C.coeffs[off];
        int t = m - 1;
        for (; t >= 0; --t) {
            if (t == axis) continue;
            off += strides[t];
            if (++idx[t] < sizes[t]) break;
            off -= static_cast<long>(sizes[t]) * strides[t];
            idx[t] = 0;
        }
        if (t < 0) break;
    }
    return sum * C.dims[axis];
}

// Bipartite coherence vectors and correlation matrix {x, y, T} for the cut
// A = subsystems 1..cut, B = the rest:
//   x_i = (d_A/2) Tr[(l_i x I) rho],  y_j = (d_B/2) Tr[(I x l_j) rho],
//   t_ij = (d_A d_B / 4) Tr[(l_i x l_j) rho].
struct BipartiteTriple {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::MatrixXd T;
};

inline BipartiteTriple bipartite_triple(const DensityMatrix& rho, int cut) {
    const int m = rho.num_subsystems();
    if (cut < 1 || cut >= m)
        throw invalid_subsystem_error("bipartite_triple: cut " + std::to_string(cut) +
                                      " outside 1.." + std::to_string(m - 1));
    int da = 1, db = 1;
    for (int s = 0; s < cut; ++s) da *= rho.dims[s];
    for (int s = cut; s < m; ++s) db *= rho.dims[s];

    const GeneratorSet ga = gellmann_generators(da);
    const GeneratorSet gb = gellmann_generators(db);

    std::vector<int> keep_a, keep_b;
    for (int s = 1; s <= cut; ++s) keep_a.push_back(s);
    for (int s = cut + 1; s <= m; ++s) keep_b.push_back(s);
    const Eigen::MatrixXcd rho_a = partial_trace(rho, keep_a).matrix;
    const Eigen::MatrixXcd rho_b = partial_trace(rho, keep_b).matrix;

    BipartiteTriple out;
    out.x.resize(da * da - 1);
    out.y.resize(db * db - 1);
    out.T.resize(da * da - 1, db * db - 1);

    for (int i = 0; i < da * da - 1; ++i)
        out.x(i) = 0.5 * da * (ga.generators[i] * rho_a).trace().real();
    for (int j = 0; j < db * db - 1; ++j)
        out.y(j) = 0.5 * db * (gb.generators[j] * rho_b).trace().real();

    // t_ij by direct contraction over the A and B factors of rho.
    for (int i = 0; i < da * da - 1; ++i)
        for (int j = 0; j < db * db - 1; ++j) {
            std::complex<double> sum = 0.0;
            for (int a1 = 0; a1 < da; ++a1)
                for (int b1 = 0; b1 < da; ++b1) {
                    const std::complex<double> la = ga.generators[i](a1, b1);
                    if (la == std::complex<double>(0.0, 0.0)) continue;
                    for (int a2 = 0; a2 < db; ++a2)
                        for (int b2 = 0; b2 < db; ++b2) {
                            const std::complex<double> lb = gb.generators[j](a2, b2);
                            if (lb == std::complex<double>(0.0, 0.0)) continue;
                            sum += la * lb *
                                   rho.matrix(static_cast<long>(b1) * db + b2,
                                              static_cast<long>(a1) * db + a2);
                        }
                }
            out.T(i, j) = 0.25 * da * db * sum.real();
        }
    return out;
}

} // namespace qcorr
