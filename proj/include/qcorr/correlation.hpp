#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qcorr/errors.hpp"
#include "qcorr/tensor.hpp"

namespace qcorr {

enum class Variant { plain, mu };

inline const char* variant_name(Variant v) { return v == Variant::mu ? "mu" : "plain"; }

// Rank-(d-1) orthogonal projector on the coherence parameter space R^{d^2-1}.
struct Projector {
    int dim = 0;   // d^2 - 1
    int rank = 0;  // d - 1
    Eigen::MatrixXd matrix;
};

inline Projector projector_from_basis(const Eigen::MatrixXd& basis) {
    Projector p;
    p.dim = static_cast<int>(basis.rows());
    p.rank = static_cast<int>(basis.cols());
    p.matrix = basis * basis.transpose();
    return p;
}

inline void validate_projector(const Projector& p) {
    if (p.matrix.rows() != p.dim || p.matrix.cols() != p.dim)
        throw invalid_dimension_error("validate_projector: shape mismatch");
    if ((p.matrix - p.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw error("validate_projector: not symmetric");
    if ((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff() > 1e-10)
        throw error("validate_projector: not idempotent");
    if (std::abs(p.matrix.trace() - static_cast<double>(p.rank)) > 1e-10)
        throw error("validate_projector: trace " + std::to_string(p.matrix.trace()) +
                    " != rank " + std::to_string(p.rank));
}

// The A_s-correlation matrix assembled from the coefficient tensor.
//
// Rows are the generator indices i_s = 1 .. d_s^2 - 1. Columns cover every
// coefficient carrying a live i_s index exactly once:
//   - the local coherence column, all other indices 0;
//   - one block per partner subsystem p != s, taken in increasing p, holding
//     the columns (i_p = 1 .. d_p^2 - 1) x (free indices i_n for n > p,
//     n != s), with i_n = 0 frozen for every n < p, n != s.
// The freezing rule prevents overcounting: the blocks partition the index
// combinations of the complement with the all-zero combination going to the
// coherence column. For m = 2 this reproduces
//   sqrt(2/(d_A^2 d_B)) [ f1 x | sqrt(2/d_B) f2 T ]
// entry for entry.
struct CorrelationMatrix {
    int subsystem = 0;  // 1-based
    Variant variant = Variant::plain;
    Eigen::MatrixXd matrix;  // (d_s^2 - 1) x prod_{k != s} d_k^2
};

namespace detail {

// Base offsets (multi-index offsets with the i_s slot zero) of the columns of
// the A_s-correlation matrix, in the canonical column order.
inline std::vector<long> correlation_column_offsets(const CoefficientTensor& C, int s) {
    const int m = C.num_subsystems();
    const auto sizes = C.index_sizes();
    const auto strides = C.strides();
    const int axis = s - 1;

    std::vector<long> cols;
    long expected = 1;
    for (int n = 0; n < m; ++n)
        if (n != axis) expected *= sizes[n];
    cols.reserve(static_cast<std::size_t>(expected));

    cols.push_back(0);  // local coherence column
    for (int p = 0; p < m; ++p) {
        if (p == axis) continue;
        std::vector<int> free_axes;  // n > p, n != axis
        for (int n = p + 1; n < m; ++n)
            if (n != axis) free_axes.push_back(n);
        for (int ip = 1; ip < sizes[p]; ++ip) {
            const long base = static_cast<long>(ip) * strides[p];
            std::vector<int> idx(free_axes.size(), 0);
            long off = base;
            while (true) {
                cols.push_back(off);
                int t = static_cast<int>(free_axes.size()) - 1;
                for (; t >= 0; --t) {
                    const int n = free_axes[t];
                    off += strides[n];
                    if (++idx[t] < sizes[n]) break;
                    off -= static_cast<long>(sizes[n]) * strides[n];
                    idx[t] = 0;
                }
                if (t < 0) break;
            }
        }
    }
    return cols;
}

} // namespace detail

inline CorrelationMatrix correlation_matrix(const CoefficientTensor& C, int s,
                                            Variant variant = Variant::plain,
                                            double complement_purity = 1.0) {
    const int m = C.num_subsystems();
    if (s < 1 || s > m)
        throw invalid_subsystem_error("correlation_matrix: subsystem " + std::to_string(s) +
                                      " outside 1.." + std::to_string(m));
    if (variant == Variant::mu && !(complement_purity > 0.0 && complement_purity <= 1.0 + 1e-12))
        throw parameter_domain_error("correlation_matrix: complement purity must be in (0, 1]");

    const auto strides = C.strides();
    const int axis = s - 1;
    const int rows = C.dims[axis] * C.dims[axis] - 1;
    const auto cols = detail::correlation_column_offsets(C, s);

    CorrelationMatrix out;
    out.subsystem = s;
    out.variant = variant;
    out.matrix.resize(rows, static_cast<long>(cols.size()));
    const double f = variant == Variant::mu ? 1.0 / std::sqrt(complement_purity) : 1.0;
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (int i = 1; i <= rows; ++i)
            out.matrix(i - 1, static_cast<long>(c)) =
                f * C.coeffs[cols[c] + static_cast<long>(i) * strides[axis]];
    return out;
}

// Eigen-decomposition of T T^t with the quantities the measure needs: the
// plain Q value (sum of the d(d-1) smallest eigenvalues, tiny ones clamped
// to zero) and the ascending eigensystem for projector construction.
struct CorrelationSpectrum {
    Eigen::VectorXd evals;  // ascending, clamped at 1e-14
    Eigen::MatrixXd evecs;  // columns aligned with evals
    int keep = 0;           // d - 1 top eigenvectors span the projector
    double q_plain = 0.0;
};

inline CorrelationSpectrum correlation_spectrum(const CoefficientTensor& C, int s) {
    const CorrelationMatrix corr = correlation_matrix(C, s);
    Eigen::MatrixXd M = corr.matrix * corr.matrix.transpose();
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);

    CorrelationSpectrum spec;
    spec.evals = es.eigenvalues();
    for (Eigen::Index i = 0; i < spec.evals.size(); ++i)
        if (spec.evals(i) < 1e-14) spec.evals(i) = 0.0;
    spec.evecs = es.eigenvectors();
    const int d = C.dims[s - 1];
    spec.keep = d - 1;
    const int drop = d * (d - 1);  // = (d^2 - 1) - (d - 1)
    spec.q_plain = spec.evals.head(drop).sum();
    return spec;
}

// Per-subsystem quantum correlation: Q = sum of the d(d-1) smallest
// eigenvalues of T T^t (divided by the complement purity for the mu
// variant), with the optimal projector spanned by the top d-1 eigenvectors.
struct SubsystemCorrelation {
    double q = 0.0;        // requested variant
    double q_plain = 0.0;  // f = 1 value
    double complement_purity = 1.0;
    Projector projector;
    bool degenerate = false;  // eigenvalue tie across the keep/drop cut
};

inline constexpr double kDegenerateGapTol = 1e-9;

inline SubsystemCorrelation subsystem_correlation(const CoefficientTensor& C, int s,
                                                  Variant variant = Variant::plain) {
    const CorrelationSpectrum spec = correlation_spectrum(C, s);
    SubsystemCorrelation out;
    out.q_plain = spec.q_plain;
    out.complement_purity = complement_purity(C, s);
    out.q = variant == Variant::mu ? spec.q_plain / out.complement_purity : spec.q_plain;
    out.projector = projector_from_basis(spec.evecs.rightCols(spec.keep));
    const Eigen::Index cut = spec.evals.size() - spec.keep;
    out.degenerate = spec.evals(cut) - spec.evals(cut - 1) < kDegenerateGapTol;
    return out;
}

// Applies a rank-(d_s - 1) projector to the subsystem-s generator indices:
// rows i_s >= 1 of every slice are mixed through P, the i_s = 0 slice is
// untouched.
inline CoefficientTensor apply_projector(const CoefficientTensor& C, int s, const Projector& P) {
    const int m = C.num_subsystems();
    if (s < 1 || s > m)
        throw invalid_subsystem_error("apply_projector: subsystem " + std::to_string(s));
    const int axis = s - 1;
    const int n = C.dims[axis] * C.dims[axis] - 1;
    if (P.dim != n)
        throw invalid_dimension_error("apply_projector: projector dim " + std::to_string(P.dim) +
                                      " does not match subsystem parameter space " +
                                      std::to_string(n));

    const auto sizes = C.index_sizes();
    const auto strides = C.strides();
    CoefficientTensor out = C;

    std::vector<int> idx(m, 0);
    long off = 0;
    Eigen::VectorXd v(n);
    while (true) {
        for (int i = 1; i <= n; ++i) v(i - 1) = C.coeffs[off + static_cast<long>(i) * strides[axis]];
        const Eigen::VectorXd w = P.matrix * v;
        for (int i = 1; i <= n; ++i) out.coeffs[off + static_cast<long>(i) * strides[axis]] = w(i - 1);
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
    return out;
}

} // namespace qcorr
