#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hybridacc/qp.hpp"
#include "oracles.hpp"

using hybridacc::QpOptions;
using hybridacc::QpProblem;
using hybridacc::QpSolution;
using hybridacc::solve_qp;

namespace {

QpProblem make_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                      const Eigen::VectorXd& lb, const Eigen::VectorXd& ub) {
    QpProblem qp;
    qp.H = H;
    qp.g = g;
    qp.lb = lb;
    qp.ub = ub;
    return qp;
}

/// Random strictly convex instance with a bounded spectrum, so the staged
/// grid refinement cannot lose the minimizer.
QpProblem random_instance(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::uniform_real_distribution<double> eig(0.5, 4.0);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M(i, j) = entry(rng);
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = eig(rng);
    const Eigen::MatrixXd H = Q * d.asDiagonal() * Q.transpose();

    Eigen::VectorXd g(n), lb(n), ub(n);
    std::uniform_real_distribution<double> lin(-3.0, 3.0);
    std::uniform_real_distribution<double> lo(-1.5, -0.2);
    std::uniform_real_distribution<double> hi(0.2, 1.5);
    for (int i = 0; i < n; ++i) {
        g(i) = lin(rng);
        lb(i) = lo(rng);
        ub(i) = hi(rng);
    }
    return make_box_qp(0.5 * (H + H.transpose()), g, lb, ub);
}

}  // namespace

TEST_CASE("scalar box QP projects the unconstrained minimizer") {
    Eigen::MatrixXd H(1, 1);
    H << 2.0;
    Eigen::VectorXd g(1), lb(1), ub(1);
    g << -4.0;
    lb << -1.0;
    ub << 1.0;
    const QpSolution sol = solve_qp(make_box_qp(H, g, lb, ub));
    CHECK(sol.u(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.converged);
    CHECK(sol.kkt_residual <= 1e-8);
}

TEST_CASE("separable box QP projects per coordinate") {
    const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd g(2);
    g << -1.0, -3.0;
    const Eigen::VectorXd lb = Eigen::VectorXd::Constant(2, -2.0);
    const Eigen::VectorXd ub = Eigen::VectorXd::Constant(2, 2.0);
    const QpSolution sol = solve_qp(make_box_qp(H, g, lb, ub));
    CHECK(sol.u(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.u(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("random 2-D instances match the dense grid oracle") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const QpProblem qp = random_instance(rng, 2);
        const QpSolution sol = solve_qp(qp);
        const Eigen::VectorXd ref = oracles::grid_search_qp(qp);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(sol.u(i) - ref(i)) < 2e-3);
        }
    }
}

TEST_CASE("staged refinement agrees with a literal 1e-3 grid in 1-D") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const QpProblem qp = random_instance(rng, 1);
        const Eigen::VectorXd staged = oracles::grid_search_qp(qp);
        const Eigen::VectorXd dense = oracles::dense_grid_qp_1d(qp);
        CHECK(std::abs(staged(0) - dense(0)) < 2e-3);
        const QpSolution sol = solve_qp(qp);
        CHECK(std::abs(sol.u(0) - dense(0)) < 2e-3);
    }
}

TEST_CASE("random instances up to n=3 match the grid oracle") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 3;
        const QpProblem qp = random_instance(rng, n);
        const QpSolution sol = solve_qp(qp);
        CHECK(sol.converged);
        CHECK(sol.kkt_residual <= 1e-6);
        const Eigen::VectorXd ref = oracles::grid_search_qp(qp);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(sol.u(i) - ref(i)) < 2e-3);
        }
    }
}

TEST_CASE("perturbing the solution never improves the cost") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 25; ++trial) {
        const QpProblem qp = random_instance(rng, 3);
        const QpSolution sol = solve_qp(qp);
        const double f_star = qp.cost(sol.u);
        for (int i = 0; i < 3; ++i) {
            for (const double delta : {1e-3, -1e-3}) {
                Eigen::VectorXd u = sol.u;
                u(i) = std::clamp(u(i) + delta, qp.lb(i), qp.ub(i));
                CHECK(qp.cost(u) >= f_star - 1e-8);
            }
        }
    }
}

TEST_CASE("identical inputs give bit-identical solutions") {
    std::mt19937 rng(41);
    const QpProblem qp = random_instance(rng, 3);
    const QpSolution a = solve_qp(qp);
    const QpSolution b = solve_qp(qp);
    REQUIRE(a.u.size() == b.u.size());
    for (int i = 0; i < a.u.size(); ++i) {
        CHECK(a.u(i) == b.u(i));  // exact, not approximate
    }
}

TEST_CASE("penalty rows bend the solution and keep stationarity") {
    // Unconstrained minimizer at 3 on each axis; a soft row caps the sum.
    QpProblem qp;
    qp.H = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    qp.g = Eigen::VectorXd::Constant(2, -6.0);
    qp.lb = Eigen::VectorXd::Constant(2, -10.0);
    qp.ub = Eigen::VectorXd::Constant(2, 10.0);
    qp.C = Eigen::MatrixXd::Ones(1, 2);
    qp.c_lo = Eigen::VectorXd::Constant(1, -100.0);
    qp.c_hi = Eigen::VectorXd::Constant(1, 2.0);
    qp.slack_weight = 1e4;

    const QpSolution sol = solve_qp(qp);
    CHECK(sol.converged);
    CHECK(sol.kkt_residual <= 1e-8);
    // Far below the unconstrained optimum, just above the soft cap.
    CHECK(sol.u.sum() < 2.1);
    CHECK(sol.u.sum() > 1.9);

    const Eigen::VectorXd ref = oracles::grid_search_qp(qp);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(sol.u(i) - ref(i)) < 2e-3);
    }
}

TEST_CASE("exhausted budget reports not converged with a usable iterate") {
    std::mt19937 rng(43);
    const QpProblem qp = random_instance(rng, 3);
    QpOptions opts;
    opts.max_iterations = 1;
    const QpSolution sol = solve_qp(qp, opts);
    CHECK_FALSE(sol.converged);
    CHECK(sol.u.size() == 3);
    CHECK(((sol.u - qp.lb).array() >= -1e-12).all());
    CHECK(((qp.ub - sol.u).array() >= -1e-12).all());
}

TEST_CASE("malformed problems are rejected") {
    QpProblem qp;
    qp.H = Eigen::MatrixXd::Identity(2, 2);
    qp.g = Eigen::VectorXd::Zero(3);
    qp.lb = Eigen::VectorXd::Constant(3, -1.0);
    qp.ub = Eigen::VectorXd::Constant(3, 1.0);
    CHECK_THROWS_AS(solve_qp(qp), std::invalid_argument);

    QpProblem crossed;
    crossed.H = Eigen::MatrixXd::Identity(2, 2);
    crossed.g = Eigen::VectorXd::Zero(2);
    crossed.lb = Eigen::VectorXd::Constant(2, 1.0);
    crossed.ub = Eigen::VectorXd::Constant(2, -1.0);
    CHECK_THROWS_AS(solve_qp(crossed), std::invalid_argument);
}
