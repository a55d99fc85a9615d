#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcorr/correlation.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/state.hpp"
#include "qcorr/tensor.hpp"

namespace qcorr {

struct MeasureOptions {
    double tie_tol = kDegenerateGapTol;  // eigenvalue gap treated as a tie
    int tie_subsets = 64;                // candidate subsets per tie, top level
    int tie_subsets_nested = 16;         // candidate subsets inside tail evaluations
    int permutation_limit = 8;           // largest m for the m! sweep
};

struct MeasureStep {
    int subsystem = 0;  // 1-based
    double q_plain = 0.0;
    double q_mu = 0.0;
    double complement_purity = 1.0;
    Projector projector;
    bool degenerate = false;
    // Spread of the downstream total over the sampled degenerate optimizer
    // choices; 0 when the optimizer is unique or the choice is immaterial.
    double tie_spread = 0.0;
};

struct MeasureReport {
    Variant variant = Variant::plain;  // variant the optimization targeted
    std::vector<int> permutation;      // 1-based subsystem order
    std::vector<MeasureStep> steps;
    double total_plain = 0.0;
    double total_mu = 0.0;

    double total(Variant v) const { return v == Variant::mu ? total_mu : total_plain; }
    double total() const { return total(variant); }
    bool any_degenerate() const {
        for (const auto& s : steps)
            if (s.degenerate) return true;
        return false;
    }
};

namespace detail {

inline double run_tail(CoefficientTensor C, const int* perm, int count, Variant v,
                       const MeasureOptions& opt, int depth);

// Keep-space choice under a degenerate cut. The optimizer is not unique:
// eigenvectors strictly above the tied eigenvalue block are forced, while
// the rest of the keep space may be any subspace of the tied block, and
// downstream Q values depend on the choice. The canonical completion picks
// among the axis subsets of the tied eigenvectors (in the eigensolver
// basis) the one whose remaining-sequence total is largest, keeping the
// plain eigensolver choice on ties. Restricting to axis subsets matters:
// continuously rotated optimizers can strictly exceed the closed-form
// sequence values of the symmetric example families, which are all attained
// on axis choices.
inline Eigen::MatrixXd resolve_tie(const CoefficientTensor& C, int s,
                                   const CorrelationSpectrum& spec, const int* rest, int rest_n,
                                   Variant v, const MeasureOptions& opt, int depth,
                                   double* spread_out) {
    const int n = static_cast<int>(spec.evals.size());
    const int keep = spec.keep;
    const int cut_hi = n - keep;  // ascending index of the smallest kept eigenvalue

    int lo = cut_hi - 1;
    while (lo > 0 && spec.evals(lo) - spec.evals(lo - 1) < opt.tie_tol) --lo;
    int hi = cut_hi;
    while (hi + 1 < n && spec.evals(hi + 1) - spec.evals(hi) < opt.tie_tol) ++hi;

    const int forced = n - 1 - hi;    // kept for sure
    const int r = keep - forced;      // chosen inside the tied block
    const int t = hi - lo + 1;        // tied block dimension
    const int cap = depth == 0 ? opt.tie_subsets : opt.tie_subsets_nested;

    auto basis_for = [&](const std::vector<int>& pick) {
        Eigen::MatrixXd basis(n, keep);
        if (forced > 0) basis.rightCols(forced) = spec.evecs.rightCols(forced);
        for (int j = 0; j < r; ++j) basis.col(j) = spec.evecs.col(lo + pick[j]);
        return basis;
    };
    auto evaluate = [&](const std::vector<int>& pick) {
        CoefficientTensor next = apply_projector(C, s, projector_from_basis(basis_for(pick)));
        return run_tail(std::move(next), rest, rest_n, v, opt, depth + 1);
    };

    // Canonical first: the top r tied eigenvectors.
    std::vector<int> canonical(r);
    std::iota(canonical.begin(), canonical.end(), t - r);
    std::vector<int> best_pick = canonical;
    double best = evaluate(canonical);
    double worst = best;

    auto consider = [&](const std::vector<int>& pick) {
        if (pick == canonical) return;
        const double val = evaluate(pick);
        if (val > best) {
            best = val;
            best_pick = pick;
        }
        if (val < worst) worst = val;
    };

    long combos = 1;
    for (int j = 0; j < r && combos <= cap; ++j) combos = combos * (t - j) / (j + 1);
    if (combos <= cap) {
        std::vector<int> pick(r);
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            consider(pick);
            int j = r - 1;
            while (j >= 0 && pick[j] == t - r + j) --j;
            if (j < 0) break;
            ++pick[j];
            for (int u = j + 1; u < r; ++u) pick[u] = pick[u - 1] + 1;
        }
    } else {
        // Contiguous windows, highest first, within the candidate budget.
        int budget = cap;
        for (int start = t - r; start >= 0 && budget > 0; --start, --budget) {
            std::vector<int> pick(r);
            std::iota(pick.begin(), pick.end(), start);
            consider(pick);
        }
    }

    if (spread_out) *spread_out = best - worst;
    return basis_for(best_pick);
}

inline MeasureStep execute_step(CoefficientTensor& C, int s, const int* rest, int rest_n,
                                Variant v, const MeasureOptions& opt, int depth) {
    const CorrelationSpectrum spec = correlation_spectrum(C, s);
    MeasureStep st;
    st.subsystem = s;
    st.q_plain = spec.q_plain;
    st.complement_purity = complement_purity(C, s);
    st.q_mu = st.q_plain / st.complement_purity;
    const Eigen::Index cut = spec.evals.size() - spec.keep;
    st.degenerate = spec.evals(cut) - spec.evals(cut - 1) < opt.tie_tol;

    Eigen::MatrixXd basis;
    if (st.degenerate && rest_n > 0 && depth <= 1)
        basis = resolve_tie(C, s, spec, rest, rest_n, v, opt, depth, &st.tie_spread);
    else
        basis = spec.evecs.rightCols(spec.keep);
    st.projector = projector_from_basis(basis);
    C = apply_projector(C, s, st.projector);
    return st;
}

inline double run_tail(CoefficientTensor C, const int* perm, int count, Variant v,
                       const MeasureOptions& opt, int depth) {
    double total = 0.0;
    for (int k = 0; k < count; ++k) {
        const MeasureStep st = execute_step(C, perm[k], perm + k + 1, count - k - 1, v, opt, depth);
        total += v == Variant::mu ? st.q_mu : st.q_plain;
    }
    return total;
}

inline void check_permutation(const std::vector<int>& permutation, int m) {
    if (static_cast<int>(permutation.size()) != m)
        throw invalid_subsystem_error("permutation has " + std::to_string(permutation.size()) +
                                      " entries, state has " + std::to_string(m) + " subsystems");
    std::vector<bool> seen(m, false);
    for (int s : permutation) {
        if (s < 1 || s > m || seen[s - 1])
            throw invalid_subsystem_error("invalid permutation entry " + std::to_string(s));
        seen[s - 1] = true;
    }
}

} // namespace detail

// Sequential total along a fixed subsystem order: each step takes the
// current tensor's Q value, then pushes the tensor through the optimal
// projector. Plain and mu sums are accumulated together; the variant decides
// which one degenerate optimizer choices are resolved for.
inline MeasureReport total_correlation_sequence(const CoefficientTensor& C0,
                                                const std::vector<int>& permutation,
                                                Variant variant = Variant::plain,
                                                const MeasureOptions& opt = {}) {
    detail::check_permutation(permutation, C0.num_subsystems());
    CoefficientTensor C = C0;
    MeasureReport rep;
    rep.variant = variant;
    rep.permutation = permutation;
    const int m = static_cast<int>(permutation.size());
    for (int k = 0; k < m; ++k) {
        MeasureStep st = detail::execute_step(C, permutation[k], permutation.data() + k + 1,
                                              m - k - 1, variant, opt, 0);
        rep.total_plain += st.q_plain;
        rep.total_mu += st.q_mu;
        rep.steps.push_back(std::move(st));
    }
    return rep;
}

inline MeasureReport total_correlation_sequence(const DensityMatrix& rho,
                                                const std::vector<int>& permutation,
                                                Variant variant = Variant::plain,
                                                const MeasureOptions& opt = {}) {
    validate(rho);
    return total_correlation_sequence(coefficient_tensor(rho), permutation, variant, opt);
}

// Maximum of the sequential total over all m! subsystem orders; ties keep
// the lexicographically smallest permutation.
inline MeasureReport total_correlation_max(const CoefficientTensor& C,
                                           Variant variant = Variant::plain,
                                           const MeasureOptions& opt = {}) {
    const int m = C.num_subsystems();
    if (m > opt.permutation_limit)
        throw permutation_limit_error("total_correlation_max: " + std::to_string(m) +
                                      " subsystems exceed the permutation limit " +
                                      std::to_string(opt.permutation_limit));
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 1);
    MeasureReport best;
    bool first = true;
    do {
        MeasureReport rep = total_correlation_sequence(C, perm, variant, opt);
        if (first || rep.total(variant) > best.total(variant)) {
            best = std::move(rep);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline MeasureReport total_correlation_max(const DensityMatrix& rho,
                                           Variant variant = Variant::plain,
                                           const MeasureOptions& opt = {}) {
    validate(rho);
    // The limit gates the tensor construction too, not just the m! sweep.
    if (rho.num_subsystems() > opt.permutation_limit)
        throw permutation_limit_error("total_correlation_max: " +
                                      std::to_string(rho.num_subsystems()) +
                                      " subsystems exceed the permutation limit " +
                                      std::to_string(opt.permutation_limit));
    return total_correlation_max(coefficient_tensor(rho), variant, opt);
}

// For bipartite states with d_A < d_B the second sequential step vanishes:
// rank(P_A T) <= d_A - 1 caps the rank of the projected B-correlation matrix
// below d_B. A violation signals a defect in the measure core.
inline MeasureReport corollary_check(const DensityMatrix& rho, double tol = 1e-10) {
    validate(rho);
    if (rho.num_subsystems() != 2 || rho.dims[0] >= rho.dims[1])
        throw invalid_subsystem_error("corollary_check: needs a bipartite state with d_A < d_B");
    MeasureReport rep = total_correlation_sequence(rho, {1, 2}, Variant::plain);
    if (rep.steps[1].q_plain > tol)
        throw error("corollary_check: second step Q = " + std::to_string(rep.steps[1].q_plain) +
                    " exceeds " + std::to_string(tol));
    return rep;
}

} // namespace qcorr
