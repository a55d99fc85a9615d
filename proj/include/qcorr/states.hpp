#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcorr/errors.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/state.hpp"

namespace qcorr {

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw parameter_domain_error(msg);
}

inline DensityMatrix pure_state(const Eigen::VectorXcd& psi, std::vector<int> dims) {
    DensityMatrix rho;
    rho.dims = std::move(dims);
    rho.matrix = psi * psi.adjoint();
    return rho;
}

} // namespace detail

// m x m Werner state ((m - x) I + (m x - 1) F) / (m^3 - m) with F the swap.
inline DensityMatrix werner(int m, double x) {
    detail::require(m >= 2 && m <= 16, "werner: m must be in [2, 16]");
    detail::require(x >= -1.0 && x <= 1.0, "werner: x must be in [-1, 1]");
    const long D = static_cast<long>(m) * m;
    const double denom = static_cast<double>(m) * m * m - m;
    Eigen::MatrixXcd mat = ((m - x) / denom) * Eigen::MatrixXcd::Identity(D, D);
    const double swap_w = (m * x - 1.0) / denom;
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) mat(static_cast<long>(k) * m + l, static_cast<long>(l) * m + k) += swap_w;
    return {{m, m}, std::move(mat)};
}

// Two-qubit Bell-diagonal state (I x I + sum_i t_i sigma_i x sigma_i) / 4.
// The t vector must lie in the tetrahedron carved out by the four positivity
// inequalities; they are checked up front so the error names the parameters
// rather than surfacing as a positivity failure later.
inline DensityMatrix bell_diagonal(double t1, double t2, double t3) {
    const double tol = 1e-12;
    detail::require(1.0 - t1 - t2 - t3 >= -tol, "bell_diagonal: 1 - t1 - t2 - t3 < 0");
    detail::require(1.0 - t1 + t2 + t3 >= -tol, "bell_diagonal: 1 - t1 + t2 + t3 < 0");
    detail::require(1.0 + t1 - t2 + t3 >= -tol, "bell_diagonal: 1 + t1 - t2 + t3 < 0");
    detail::require(1.0 + t1 + t2 - t3 >= -tol, "bell_diagonal: 1 + t1 + t2 - t3 < 0");
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(4, 4);
    mat(0, 0) = mat(3, 3) = (1.0 + t3) / 4.0;
    mat(1, 1) = mat(2, 2) = (1.0 - t3) / 4.0;
    mat(0, 3) = mat(3, 0) = (t1 - t2) / 4.0;
    mat(1, 2) = mat(2, 1) = (t1 + t2) / 4.0;
    return {{2, 2}, std::move(mat)};
}

// lambda * bell_diagonal(t) + (1 - lambda) * (I/2 x (I + r . sigma)/2).
inline DensityMatrix bd_product_mixture(double lambda, const std::array<double, 3>& t,
                                        const std::array<double, 3>& r) {
    detail::require(lambda >= 0.0 && lambda <= 1.0, "bd_product_mixture: lambda must be in [0, 1]");
    const double rn = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    detail::require(rn <= 1.0 + 1e-12, "bd_product_mixture: |r| must be <= 1");
    DensityMatrix bd = bell_diagonal(t[0], t[1], t[2]);
    Eigen::Matrix2cd single;
    const std::complex<double> iu(0.0, 1.0);
    single << 1.0 + r[2], r[0] - iu * r[1], r[0] + iu * r[1], 1.0 - r[2];
    single *= 0.5;
    const Eigen::MatrixXcd prod = kron(0.5 * Eigen::Matrix2cd::Identity(), single);
    return {{2, 2}, lambda * bd.matrix + (1.0 - lambda) * prod};
}

inline DensityMatrix ghz(int n) {
    detail::require(n >= 2 && n <= 10, "ghz: n must be in [2, 10]");
    const long D = 1L << n;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(D);
    psi(0) = psi(D - 1) = 1.0 / std::sqrt(2.0);
    return detail::pure_state(psi, std::vector<int>(n, 2));
}

// Uniform superposition of the single-excitation basis states.
inline DensityMatrix w_state(int n) {
    detail::require(n >= 2 && n <= 10, "w: n must be in [2, 10]");
    const long D = 1L << n;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(D);
    for (int k = 0; k < n; ++k) psi(1L << (n - 1 - k)) = 1.0 / std::sqrt(static_cast<double>(n));
    return detail::pure_state(psi, std::vector<int>(n, 2));
}

// (1 - lambda)/8 I + lambda |GHZ><GHZ| on three qubits.
inline DensityMatrix werner_ghz(double lambda) {
    detail::require(lambda >= 0.0 && lambda <= 1.0, "werner_ghz: lambda must be in [0, 1]");
    DensityMatrix g = ghz(3);
    g.matrix = lambda * g.matrix +
               ((1.0 - lambda) / 8.0) * Eigen::MatrixXcd::Identity(8, 8);
    return g;
}

// lambda |W><W| + (1 - lambda) |GHZ><GHZ| on three qubits.
inline DensityMatrix w_ghz(double lambda) {
    detail::require(lambda >= 0.0 && lambda <= 1.0, "w_ghz: lambda must be in [0, 1]");
    DensityMatrix w = w_state(3);
    DensityMatrix g = ghz(3);
    w.matrix = lambda * w.matrix + (1.0 - lambda) * g.matrix;
    return w;
}

// Diagonal state sum_k p_k |k><k| in the computational product basis.
inline DensityMatrix classical_diagonal(const std::vector<int>& dims,
                                        const std::vector<double>& probs) {
    DensityMatrix rho;
    rho.dims = dims;
    const long D = rho.total_dim();
    detail::require(!dims.empty(), "classical_diagonal: empty dims");
    detail::require(static_cast<long>(probs.size()) == D,
                    "classical_diagonal: need " + std::to_string(D) + " probabilities");
    double sum = 0.0;
    for (double p : probs) {
        detail::require(p >= -1e-12, "classical_diagonal: negative probability");
        sum += p;
    }
    detail::require(std::abs(sum - 1.0) <= 1e-10, "classical_diagonal: probabilities must sum to 1");
    rho.matrix = Eigen::MatrixXcd::Zero(D, D);
    for (long k = 0; k < D; ++k) rho.matrix(k, k) = probs[k];
    return rho;
}

// G G^dag / Tr(G G^dag) with G a D x rank matrix of seeded standard complex
// Gaussians; deterministic for a given seed.
inline DensityMatrix random_mixed(const std::vector<int>& dims, int rank, std::uint64_t seed) {
    DensityMatrix rho;
    rho.dims = dims;
    const long D = rho.total_dim();
    detail::require(rank >= 1 && rank <= D, "random_mixed: rank must be in [1, D]");
    SplitMix64 rng(seed);
    Eigen::MatrixXcd g(D, rank);
    for (long i = 0; i < D; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = rng.complex_gaussian();
    Eigen::MatrixXcd m = g * g.adjoint();
    rho.matrix = m / m.trace().real();
    return rho;
}

// Closed-form reference curves for the three-qubit Werner-GHZ family:
// the geometric global discord and the symmetric discord (0 log 0 := 0).
struct WernerGhzReference {
    double d_s = 0.0;
    double d_gg = 0.0;
};

inline WernerGhzReference werner_ghz_reference_curves(double lambda) {
    detail::require(lambda >= 0.0 && lambda <= 1.0,
                    "werner_ghz_reference_curves: lambda must be in [0, 1]");
    auto xlog2 = [](double v) { return v > 0.0 ? v * std::log2(v) : 0.0; };
    WernerGhzReference out;
    out.d_gg = 0.5 * lambda * lambda;
    out.d_s = -0.25 * xlog2(1.0 + 3.0 * lambda) + 0.125 * xlog2(1.0 - lambda) +
              0.125 * xlog2(1.0 + 7.0 * lambda);
    return out;
}

// Named state family plus raw parameter strings; vector-valued parameters
// use '|' between components, dims use 'x' (e.g. dims=2x2x3).
struct StateSpec {
    std::string family;
    std::map<std::string, std::string> params;
};

inline StateSpec parse_state_spec(const std::string& text) {
    StateSpec spec;
    const auto colon = text.find(':');
    spec.family = text.substr(0, colon);
    if (spec.family.empty()) throw parse_error("state spec: empty family name");
    if (colon == std::string::npos) return spec;
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw parse_error("state spec: expected key=value, got '" + item + "'");
        spec.params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return spec;
}

namespace detail {

inline std::string spec_get(const StateSpec& spec, const std::string& key) {
    const auto it = spec.params.find(key);
    if (it == spec.params.end())
        throw parse_error("state spec '" + spec.family + "': missing parameter '" + key + "'");
    return it->second;
}

inline double spec_double(const StateSpec& spec, const std::string& key) {
    const std::string raw = spec_get(spec, key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw parse_error("state spec: parameter '" + key + "' is not a number: '" + raw + "'");
    }
}

inline long spec_int(const StateSpec& spec, const std::string& key) {
    const double v = spec_double(spec, key);
    if (v != std::floor(v)) throw parse_error("state spec: parameter '" + key + "' must be an integer");
    return static_cast<long>(v);
}

inline std::vector<double> split_doubles(const std::string& raw, char sep, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw parse_error("state spec: bad " + what + " component '" + item + "'");
        }
    }
    if (out.empty()) throw parse_error("state spec: empty " + what);
    return out;
}

inline std::vector<int> spec_dims(const StateSpec& spec) {
    const auto parts = split_doubles(spec_get(spec, "dims"), 'x', "dims");
    std::vector<int> dims;
    for (double v : parts) {
        if (v != std::floor(v) || v < 2)
            throw parse_error("state spec: dims components must be integers >= 2");
        dims.push_back(static_cast<int>(v));
    }
    return dims;
}

inline std::array<double, 3> spec_vec3(const StateSpec& spec, const std::string& key) {
    const auto parts = split_doubles(spec_get(spec, key), '|', key);
    if (parts.size() != 3)
        throw parse_error("state spec: parameter '" + key + "' needs 3 components");
    return {parts[0], parts[1], parts[2]};
}

} // namespace detail

inline DensityMatrix build(const StateSpec& spec) {
    using namespace detail;
    if (spec.family == "werner")
        return werner(static_cast<int>(spec_int(spec, "m")), spec_double(spec, "x"));
    if (spec.family == "bell_diagonal")
        return bell_diagonal(spec_double(spec, "t1"), spec_double(spec, "t2"),
                             spec_double(spec, "t3"));
    if (spec.family == "bd_product_mixture")
        return bd_product_mixture(spec_double(spec, "lambda"), spec_vec3(spec, "t"),
                                  spec_vec3(spec, "r"));
    if (spec.family == "ghz") return ghz(static_cast<int>(spec_int(spec, "n")));
    if (spec.family == "w") return w_state(static_cast<int>(spec_int(spec, "n")));
    if (spec.family == "werner_ghz") return werner_ghz(spec_double(spec, "lambda"));
    if (spec.family == "w_ghz") return w_ghz(spec_double(spec, "lambda"));
    if (spec.family == "classical_diagonal")
        return classical_diagonal(spec_dims(spec),
                                  split_doubles(spec_get(spec, "probs"), '|', "probs"));
    if (spec.family == "random_mixed")
        return random_mixed(spec_dims(spec), static_cast<int>(spec_int(spec, "rank")),
                            static_cast<std::uint64_t>(spec_int(spec, "seed")));
    throw parse_error("state spec: unknown family '" + spec.family + "'");
}

} // namespace qcorr
