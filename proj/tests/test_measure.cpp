#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "qcorr/qcorr.hpp"

using namespace qcorr;
using Catch::Approx;

namespace {

DensityMatrix bell_state() {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    return {{2, 2}, psi * psi.adjoint()};
}

// Closed forms for the mixture of a Bell-diagonal state with a product state
// at r = (0, r2, 0): the two sequential totals differ.
double mixture_q_ab(double lambda, double t, double r2) {
    const double lt = lambda * t, pr = (1.0 - lambda) * r2;
    return 0.25 * (2.0 * lt * lt + std::min(lt * lt, pr * pr));
}

double mixture_q_ba(double lambda, double t, double r2) {
    const double lt = lambda * t, pr = (1.0 - lambda) * r2;
    return 0.25 * (lt * lt + std::min(lt * lt, lt * lt + pr * pr));
}

} // namespace

TEST_CASE("correlation matrix of the Bell state has T T^t = I/4") {
    const CoefficientTensor C = coefficient_tensor(bell_state());
    const CorrelationMatrix corr = correlation_matrix(C, 1);
    REQUIRE(corr.matrix.rows() == 3);
    REQUIRE(corr.matrix.cols() == 4);
    const Eigen::Matrix3d m = corr.matrix * corr.matrix.transpose();
    CHECK((m - 0.25 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("correlation matrix of the maximally mixed state vanishes") {
    DensityMatrix mixed{{2, 2, 2}, Eigen::MatrixXcd::Identity(8, 8) / 8.0};
    const CoefficientTensor C = coefficient_tensor(mixed);
    for (int s = 1; s <= 3; ++s)
        CHECK(correlation_matrix(C, s).matrix.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("correlation matrix column count is the product of partner index ranges") {
    const DensityMatrix rho = random_mixed({2, 3, 2}, 4, 321);
    const CoefficientTensor C = coefficient_tensor(rho);
    CHECK(correlation_matrix(C, 1).matrix.cols() == 9 * 4);
    CHECK(correlation_matrix(C, 2).matrix.cols() == 4 * 4);
    CHECK(correlation_matrix(C, 3).matrix.cols() == 4 * 9);
    CHECK_THROWS_AS(correlation_matrix(C, 4), invalid_subsystem_error);
}

TEST_CASE("tripartite A_1-correlation spectrum equals the bipartite route") {
    // Independent route: the A-correlation matrix assembled from {x, T} of
    // the 2 x (dB) cut, sqrt(2/(dA^2 dB)) [x | sqrt(2/dB) T].
    int seed = 777;
    for (const auto& dims : std::vector<std::vector<int>>{{2, 2, 2}, {2, 3, 2}, {3, 2, 2}}) {
        for (int rep = 0; rep < 6; ++rep) {
            const DensityMatrix rho = random_mixed(dims, 3, seed++);
            const CoefficientTensor C = coefficient_tensor(rho);
            const CorrelationSpectrum spec = correlation_spectrum(C, 1);

            const BipartiteTriple t = bipartite_triple(rho, 1);
            const double da = dims[0];
            const double db = rho.total_dim() / dims[0];
            Eigen::MatrixXd bip(t.x.size(), 1 + t.T.cols());
            bip.col(0) = t.x;
            bip.rightCols(t.T.cols()) = std::sqrt(2.0 / db) * t.T;
            bip *= std::sqrt(2.0 / (da * da * db));
            Eigen::MatrixXd m = bip * bip.transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
            for (int i = 0; i < es.eigenvalues().size(); ++i)
                CHECK(std::abs(es.eigenvalues()(i) - spec.evals(i)) < 1e-10);
        }
    }
}

TEST_CASE("subsystem correlation of the Bell state is 1/2") {
    const CoefficientTensor C = coefficient_tensor(bell_state());
    const SubsystemCorrelation sub = subsystem_correlation(C, 1);
    CHECK(sub.q == Approx(0.5).margin(1e-12));
    CHECK(sub.degenerate);  // three equal eigenvalues
    validate_projector(sub.projector);
}

TEST_CASE("subsystem correlation of the two-qubit Werner state is (2x-1)^2/18") {
    for (const double x : {-0.8, -0.2, 0.3, 0.7, 1.0}) {
        const CoefficientTensor C = coefficient_tensor(werner(2, x));
        const SubsystemCorrelation sub = subsystem_correlation(C, 1);
        const double expected = std::pow(2.0 * x - 1.0, 2) / 18.0;
        CHECK(sub.q_plain == Approx(expected).margin(1e-12));
        // mu variant rescales by the maximally mixed marginal purity 1/2
        const SubsystemCorrelation mu = subsystem_correlation(C, 1, Variant::mu);
        CHECK(mu.q == Approx(2.0 * expected).margin(1e-12));
    }
}

TEST_CASE("classical-classical states carry no subsystem correlation") {
    const DensityMatrix rho =
        classical_diagonal({2, 2}, {0.4, 0.3, 0.2, 0.1});
    const CoefficientTensor C = coefficient_tensor(rho);
    CHECK(subsystem_correlation(C, 1).q < 1e-10);
    CHECK(subsystem_correlation(C, 2).q < 1e-10);
}

TEST_CASE("apply_projector touches only the live generator sector") {
    const DensityMatrix rho = random_mixed({2, 2}, 3, 42);
    CoefficientTensor C = coefficient_tensor(rho);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3, 1);
    basis(2, 0) = 1.0;
    const Projector p = projector_from_basis(basis);
    const CoefficientTensor after = apply_projector(C, 1, p);
    const auto strides = C.strides();
    for (int j = 0; j < 4; ++j) {
        CHECK(after.coeffs[j] == C.coeffs[j]);  // i_1 = 0 slice unchanged
        CHECK(after.coeffs[3 * strides[0] + j] == Approx(C.coeffs[3 * strides[0] + j]));
        CHECK(std::abs(after.coeffs[1 * strides[0] + j]) < 1e-15);
        CHECK(std::abs(after.coeffs[2 * strides[0] + j]) < 1e-15);
    }
    Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(8, 2);
    wrong(0, 0) = wrong(1, 1) = 1.0;
    CHECK_THROWS_AS(apply_projector(C, 1, projector_from_basis(wrong)), invalid_dimension_error);
}

TEST_CASE("projected mixture reproduces the explicit B-correlation matrix") {
    // Distinct |t1| > |t2| > |t3| keeps the optimizer unique: P_A = diag(1,0,0)
    // and the projected B-correlation matrix takes the closed 3 x 4 form.
    const double lambda = 0.7, t1 = 0.5, t2 = 0.3, t3 = 0.1;
    const std::array<double, 3> r = {0.2, 0.4, 0.1};
    const DensityMatrix rho = bd_product_mixture(lambda, {t1, t2, t3}, r);
    CoefficientTensor C = coefficient_tensor(rho);

    const SubsystemCorrelation sub = subsystem_correlation(C, 1);
    CHECK_FALSE(sub.degenerate);
    CHECK(sub.q_plain == Approx(0.25 * lambda * lambda * (t2 * t2 + t3 * t3)).margin(1e-12));
    Eigen::Matrix3d p_expected = Eigen::Matrix3d::Zero();
    p_expected(0, 0) = 1.0;
    CHECK((sub.projector.matrix - p_expected).cwiseAbs().maxCoeff() < 1e-10);

    C = apply_projector(C, 1, sub.projector);
    const CorrelationMatrix corr_b = correlation_matrix(C, 2);
    Eigen::MatrixXd expected(3, 4);
    expected << r[0] * (1 - lambda), t1 * lambda, 0, 0,
                r[1] * (1 - lambda), 0, 0, 0,
                r[2] * (1 - lambda), 0, 0, 0;
    expected *= 0.5;
    CHECK((corr_b.matrix - expected).cwiseAbs().maxCoeff() < 1e-10);

    // Q_B closed form: (h - sqrt(h^2 - k^2))/8.
    const double h = lambda * lambda * t1 * t1 +
                     std::pow(1 - lambda, 2) * (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    const double k =
        2.0 * lambda * (1 - lambda) * t1 * std::sqrt(r[1] * r[1] + r[2] * r[2]);
    const double q_b = subsystem_correlation(C, 2).q_plain;
    CHECK(q_b == Approx(0.125 * (h - std::sqrt(h * h - k * k))).margin(1e-10));
}

TEST_CASE("Werner-GHZ sequential steps are (l^2/2, l^2/4, 0)") {
    for (const double lambda : {0.2, 0.5, 0.75, 1.0}) {
        const MeasureReport rep =
            total_correlation_sequence(werner_ghz(lambda), {1, 2, 3}, Variant::plain);
        const double l2 = lambda * lambda;
        CHECK(rep.steps[0].q_plain == Approx(0.5 * l2).margin(1e-9));
        CHECK(rep.steps[1].q_plain == Approx(0.25 * l2).margin(1e-9));
        CHECK(rep.steps[2].q_plain == Approx(0.0).margin(1e-9));
        CHECK(rep.total_plain == Approx(0.75 * l2).margin(1e-9));
        CHECK(rep.steps[0].degenerate);
    }
}

TEST_CASE("Werner-GHZ mu total is l^2 (3 + l^2)/(1 + l^2)") {
    for (const double lambda : {0.1, 0.5, 0.9}) {
        const MeasureReport rep = total_correlation_max(werner_ghz(lambda), Variant::mu);
        const double l2 = lambda * lambda;
        CHECK(rep.total_mu == Approx(l2 * (3.0 + l2) / (1.0 + l2)).margin(1e-9));
        CHECK(rep.steps[0].complement_purity == Approx(0.25 * (1.0 + l2)).margin(1e-10));
        CHECK(rep.steps[1].complement_purity == Approx(0.25).margin(1e-10));
    }
}

TEST_CASE("mixture sequences reproduce both closed-form totals") {
    for (const double x : {0.0, 0.3, 0.6, 0.9})
        for (const double r2 : {0.0, 0.35, 0.8}) {
            const double t = (2.0 * x - 1.0) / 3.0;
            const DensityMatrix rho = bd_product_mixture(0.5, {t, t, t}, {0.0, r2, 0.0});
            const double q_ab = total_correlation_sequence(rho, {1, 2}).total_plain;
            const double q_ba = total_correlation_sequence(rho, {2, 1}).total_plain;
            CHECK(q_ab == Approx(mixture_q_ab(0.5, t, r2)).margin(1e-9));
            CHECK(q_ba == Approx(mixture_q_ba(0.5, t, r2)).margin(1e-9));
            const double q_max = total_correlation_max(rho).total_plain;
            CHECK(q_max == Approx(std::max(q_ab, q_ba)).margin(1e-12));
        }
}

TEST_CASE("permutation max of a symmetric state matches every order") {
    const DensityMatrix rho = werner_ghz(0.6);
    const MeasureReport best = total_correlation_max(rho);
    std::vector<int> perm = {1, 2, 3};
    do {
        const double total = total_correlation_sequence(rho, perm).total_plain;
        CHECK(total == Approx(best.total_plain).margin(1e-9));
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("product states carry zero total correlation") {
    const DensityMatrix a = random_mixed({2}, 2, 11);
    const DensityMatrix b = random_mixed({3}, 2, 12);
    DensityMatrix prod{{2, 3}, kron(a.matrix, b.matrix)};
    CHECK(total_correlation_max(prod).total_plain < 1e-10);
    CHECK(total_correlation_max(prod, Variant::mu).total_mu < 1e-9);
}

TEST_CASE("invalid permutations and oversized sweeps are rejected") {
    const DensityMatrix rho = bell_state();
    CHECK_THROWS_AS(total_correlation_sequence(rho, {1}), invalid_subsystem_error);
    CHECK_THROWS_AS(total_correlation_sequence(rho, {1, 1}), invalid_subsystem_error);
    CHECK_THROWS_AS(total_correlation_sequence(rho, {0, 1}), invalid_subsystem_error);
    MeasureOptions opt;
    opt.permutation_limit = 1;
    CHECK_THROWS_AS(total_correlation_max(rho, Variant::plain, opt), permutation_limit_error);
}

TEST_CASE("report totals are the sums of the per-step values") {
    const DensityMatrix rho = random_mixed({2, 2, 2}, 5, 99);
    const MeasureReport rep = total_correlation_max(rho);
    double plain = 0.0, mu = 0.0;
    for (const auto& st : rep.steps) {
        plain += st.q_plain;
        mu += st.q_mu;
        CHECK(st.q_plain >= -1e-12);
    }
    CHECK(rep.total_plain == Approx(plain).margin(1e-12));
    CHECK(rep.total_mu == Approx(mu).margin(1e-12));
}

TEST_CASE("corollary: second step vanishes when d_A < d_B") {
    int seed = 3000;
    for (int rep = 0; rep < 20; ++rep) {
        const DensityMatrix rho = random_mixed({2, 3}, 1 + rep % 6, seed++);
        CHECK_NOTHROW(corollary_check(rho));
    }
    const DensityMatrix embedded = random_mixed({2, 4}, 2, seed);
    CHECK_NOTHROW(corollary_check(embedded));
    CHECK_THROWS_AS(corollary_check(random_mixed({3, 3}, 2, seed + 1)), invalid_subsystem_error);
}

TEST_CASE("square 3x3 states may keep a nonzero second step") {
    int seed = 4000;
    bool saw_nonzero = false;
    for (int rep = 0; rep < 10; ++rep) {
        const DensityMatrix rho = random_mixed({3, 3}, 2, seed++);
        const MeasureReport rep_ab = total_correlation_sequence(rho, {1, 2});
        if (rep_ab.steps[1].q_plain > 1e-6) saw_nonzero = true;
    }
    CHECK(saw_nonzero);
}

TEST_CASE("Werner degenerate-projector robustness: any choice kills the second step") {
    SplitMix64 rng(123);
    for (const double x : {0.1, 0.9}) {
        const CoefficientTensor C = coefficient_tensor(werner(2, x));
        for (int rep = 0; rep < 20; ++rep) {
            const Projector p = projector_from_basis(random_orthonormal(3, 1, rng));
            const CoefficientTensor after = apply_projector(C, 1, p);
            CHECK(subsystem_correlation(after, 2).q_plain < 1e-10);
        }
    }
}

TEST_CASE("totals are invariant under local unitaries") {
    SplitMix64 rng(31);
    int seed = 5000;
    for (const auto& dims : std::vector<std::vector<int>>{{2, 2}, {2, 3}, {2, 2, 2}}) {
        for (int rep = 0; rep < 5; ++rep) {
            const DensityMatrix rho = random_mixed(dims, 3, seed++);
            const MeasureReport base_p = total_correlation_max(rho, Variant::plain);
            const MeasureReport base_m = total_correlation_max(rho, Variant::mu);
            Eigen::MatrixXcd u = random_unitary(dims[0], rng);
            for (std::size_t s = 1; s < dims.size(); ++s) u = kron(u, random_unitary(dims[s], rng));
            const DensityMatrix rotated{dims, u * rho.matrix * u.adjoint()};
            CHECK(total_correlation_max(rotated, Variant::plain).total_plain ==
                  Approx(base_p.total_plain).margin(1e-8));
            CHECK(total_correlation_max(rotated, Variant::mu).total_mu ==
                  Approx(base_m.total_mu).margin(1e-8));
        }
    }
}

TEST_CASE("mu single-step value ignores unitaries on the unmeasured side") {
    SplitMix64 rng(63);
    int seed = 6000;
    for (int rep = 0; rep < 10; ++rep) {
        const DensityMatrix rho = random_mixed({2, 3}, 2, seed++);
        const double base = subsystem_correlation(coefficient_tensor(rho), 1, Variant::mu).q;
        const Eigen::MatrixXcd u = kron(Eigen::MatrixXcd::Identity(2, 2), random_unitary(3, rng));
        const DensityMatrix rotated{{2, 3}, u * rho.matrix * u.adjoint()};
        CHECK(subsystem_correlation(coefficient_tensor(rotated), 1, Variant::mu).q ==
              Approx(base).margin(1e-8));
    }
}

TEST_CASE("brute-force projector oracle confirms the eigenvalue formula") {
    const CoefficientTensor bell = coefficient_tensor(bell_state());
    const double oracle = brute_force_projector_min(bell, 1, Variant::plain, 200, 500, 5);
    CHECK(oracle == Approx(0.5).margin(1e-6));

    int seed = 7000;
    for (int rep = 0; rep < 6; ++rep) {
        const DensityMatrix rho = random_mixed({2, 2, 2}, 2 + rep % 4, seed++);
        CoefficientTensor C = coefficient_tensor(rho);
        for (int s = 1; s <= 3; ++s) {
            const SubsystemCorrelation sub = subsystem_correlation(C, s);
            const double got = brute_force_projector_min(C, s, Variant::plain, 200, 500, seed + s);
            CHECK(std::abs(sub.q_plain - got) < 1e-6);
            CHECK(sub.q_plain <= got + 1e-9);  // analytic value is the true minimum
            C = apply_projector(C, s, sub.projector);
        }
    }
}

TEST_CASE("qubit measurement oracle matches the plain measure") {
    const double bell_oracle = geometric_discord_qubit_oracle(bell_state());
    CHECK(bell_oracle == Approx(0.5).margin(1e-6));

    // Classical-quantum state, diagonal on the measured qubit.
    const DensityMatrix a0 = random_mixed({2}, 2, 1);
    const DensityMatrix a1 = random_mixed({2}, 2, 2);
    Eigen::MatrixXcd cq = Eigen::MatrixXcd::Zero(4, 4);
    cq.block(0, 0, 2, 2) = 0.6 * a0.matrix;
    cq.block(2, 2, 2, 2) = 0.4 * a1.matrix;
    CHECK(geometric_discord_qubit_oracle({{2, 2}, cq}) < 1e-8);

    int seed = 8000;
    for (int rep = 0; rep < 30; ++rep) {
        const DensityMatrix rho = random_mixed({2, 2}, 1 + rep % 4, seed++);
        const double analytic = subsystem_correlation(coefficient_tensor(rho), 1).q_plain;
        const double oracle = geometric_discord_qubit_oracle(rho, 48, 96, 400, seed);
        CHECK(std::abs(analytic - oracle) < 1e-6);
    }

    CHECK_THROWS_AS(geometric_discord_qubit_oracle(random_mixed({3, 2}, 2, 9)),
                    invalid_dimension_error);
}

TEST_CASE("permutation max dominates every explicit sequence") {
    int seed = 9000;
    for (int rep = 0; rep < 5; ++rep) {
        const DensityMatrix rho = random_mixed({2, 2, 2}, 4, seed++);
        const double best = total_correlation_max(rho).total_plain;
        std::vector<int> perm = {1, 2, 3};
        do {
            CHECK(best >= total_correlation_sequence(rho, perm).total_plain - 1e-12);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}
