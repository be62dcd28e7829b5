#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "hybridacc/mpc.hpp"
#include "oracles.hpp"

using hybridacc::AccelEstimate;
using hybridacc::DiscreteModel;
using hybridacc::LeadPrediction;
using hybridacc::MpcCommand;
using hybridacc::MpcConfig;
using hybridacc::MpcController;
using hybridacc::QpProblem;
using hybridacc::QpSolution;
using hybridacc::VehicleState;
using hybridacc::assemble_qp;
using hybridacc::discretize;
using hybridacc::estimate_lead_accel;
using hybridacc::mpc_target_speed;
using hybridacc::predict_lead;
using hybridacc::predict_lead_horizon;
using hybridacc::solve_qp;

TEST_CASE("lead prediction: uniform motion, stop clamp, parked") {
    CHECK(predict_lead({100.0, 10.0, 0.0}, 0.0, 5, 0.1) ==
          doctest::Approx(105.0).epsilon(1e-12));

    // Braking at 5 from 10 m/s stops after 10 m; large k stays clamped.
    CHECK(predict_lead({0.0, 10.0, 0.0}, -5.0, 2000, 0.1) ==
          doctest::Approx(10.0).epsilon(1e-12));
    CHECK(predict_lead({0.0, 10.0, 0.0}, -5.0, 20, 0.1) ==
          doctest::Approx(10.0).epsilon(1e-12));

    // Already stopped, never reverses.
    CHECK(predict_lead({0.0, 0.0, 0.0}, -3.0, 50, 0.1) == 0.0);
}

TEST_CASE("lead horizon freezes speed and acceleration at the stop") {
    const LeadPrediction pred = predict_lead_horizon({0.0, 1.0, 0.0}, -2.0, 10, 0.1);
    // Stop at t = 0.5 s, i.e. k = 5.
    CHECK(pred.v[4] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pred.v[9] == 0.0);
    CHECK(pred.a[1] == -2.0);
    CHECK(pred.a[9] == 0.0);
    CHECK(pred.p[9] == doctest::Approx(0.25).epsilon(1e-12));
    for (size_t k = 1; k < 10; ++k) CHECK(pred.p[k] >= pred.p[k - 1]);
}

TEST_CASE("lead acceleration estimate") {
    const std::vector<double> constant{10, 10, 10, 10, 10};
    CHECK(estimate_lead_accel(constant, 0.1).value ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(estimate_lead_accel(constant, 0.1).cold_start);

    const std::vector<double> ramp{10.0, 9.7, 9.4, 9.1, 8.8};
    CHECK(estimate_lead_accel(ramp, 0.1).value ==
          doctest::Approx(-3.0).epsilon(1e-12));

    const std::vector<double> single{10.0};
    const AccelEstimate cold = estimate_lead_accel(single, 0.1);
    CHECK(cold.value == 0.0);
    CHECK(cold.cold_start);

    // Independent check: slope from explicit normal equations on (t_i, v_i).
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> noise(-0.5, 0.5);
    std::vector<double> history(5);
    for (int trial = 0; trial < 20; ++trial) {
        double st = 0, sv = 0, stt = 0, stv = 0;
        for (int i = 0; i < 5; ++i) {
            history[static_cast<size_t>(i)] = 12.0 + noise(rng);
            const double t = i * 0.05;
            st += t;
            sv += history[static_cast<size_t>(i)];
            stt += t * t;
            stv += t * history[static_cast<size_t>(i)];
        }
        const double slope = (5.0 * stv - st * sv) / (5.0 * stt - st * st);
        CHECK(estimate_lead_accel(history, 0.05).value ==
              doctest::Approx(slope).epsilon(1e-9));
    }
}

namespace {

MpcConfig experiment_config() {
    return MpcConfig{};  // defaults carry the experiment values
}

LeadPrediction coasting_lead(double p0, double v0, int h, double dt) {
    return predict_lead_horizon({p0, v0, 0.0}, 0.0, h, dt);
}

}  // namespace

TEST_CASE("assembled QP is the equilibrium at a perfect gap") {
    MpcConfig cfg = experiment_config();
    cfg.h = 1;
    const DiscreteModel model = discretize(0.3, 0.05);
    const VehicleState ego{0.0, 12.0, 0.0};
    const QpProblem qp =
        assemble_qp(cfg, model, ego, coasting_lead(20.0, 12.0, 1, 0.05));
    // Unconstrained minimizer -g/H must be zero input.
    CHECK(std::abs(qp.g(0) / qp.H(0, 0)) < 1e-9);
}

TEST_CASE("assembled QP shape and spectrum for the experiment config") {
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);
    const VehicleState ego{0.0, 5.0, 0.0};
    const QpProblem qp =
        assemble_qp(cfg, model, ego, coasting_lead(30.0, 12.0, 10, 0.05));

    REQUIRE(qp.H.rows() == 10);
    REQUIRE(qp.H.cols() == 10);
    CHECK((qp.H - qp.H.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp.H);
    CHECK(eig.eigenvalues().minCoeff() >= cfg.r);
}

TEST_CASE("condensed cost equals the rollout cost") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    std::uniform_real_distribution<double> vel(0.0, 20.0);
    std::uniform_real_distribution<double> acc(-3.0, 3.0);

    for (int trial = 0; trial < 30; ++trial) {
        MpcConfig cfg = experiment_config();
        cfg.h = (trial % 2 == 0) ? 2 : 10;
        const DiscreteModel model = discretize(0.3, 0.05);
        const VehicleState ego{pos(rng), vel(rng), acc(rng)};
        const VehicleState lead{20.0 + pos(rng), vel(rng), 0.0};
        const double a_a = acc(rng);
        const LeadPrediction pred =
            predict_lead_horizon(lead, a_a, cfg.h, model.dt);

        Eigen::VectorXd u(cfg.h);
        for (int k = 0; k < cfg.h; ++k) u(k) = acc(rng);

        // Without penalties the condensed quadratic is the horizon sum.
        MpcConfig no_slack = cfg;
        no_slack.slack_weight = 0.0;
        const QpProblem plain = assemble_qp(no_slack, model, ego, pred);
        const double direct = oracles::rollout_cost(cfg, model, ego, pred, u);
        CHECK(plain.cost(u) == doctest::Approx(direct).epsilon(1e-9));

        // With penalties the difference is exactly the speed-bound penalty
        // accumulated along the same rollout.
        const QpProblem soft = assemble_qp(cfg, model, ego, pred);
        const double penalty =
            oracles::rollout_speed_penalty(cfg, model, ego, u);
        CHECK(soft.cost(u) ==
              doctest::Approx(direct + penalty).epsilon(1e-8));
    }
}

TEST_CASE("assemble_qp rejects wrong horizon arrays") {
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);
    LeadPrediction pred = coasting_lead(30.0, 12.0, 9, 0.05);  // h-1 entries
    CHECK_THROWS_AS(assemble_qp(cfg, model, {0, 0, 0}, pred),
                    std::invalid_argument);
}

TEST_CASE("target speed at the tracking equilibrium") {
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);
    const MpcCommand cmd =
        mpc_target_speed(cfg, model, {0.0, 12.0, 0.0}, {20.0, 12.0, 0.0}, 0.0);
    CHECK(cmd.v_mpc == doctest::Approx(12.0).epsilon(0.01));
    CHECK(cmd.converged);
}

TEST_CASE("target speed signs: accelerate toward, brake behind") {
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);

    const MpcCommand go =
        mpc_target_speed(cfg, model, {0.0, 0.0, 0.0}, {10.0, 12.0, 0.0}, 0.0);
    CHECK(go.v_mpc > 0.0);
    CHECK(go.u_first > 0.0);

    const MpcCommand stop =
        mpc_target_speed(cfg, model, {0.0, 20.0, 0.0}, {5.0, 0.0, 0.0}, 0.0);
    CHECK(stop.v_mpc < 20.0);
    CHECK(stop.u_first < 0.0);
}

TEST_CASE("only the first input shapes the emitted speed") {
    MpcConfig cfg = experiment_config();
    cfg.prediction_dt = 0.0;  // predict on the plant grid
    const DiscreteModel model = discretize(0.3, 0.05);
    const VehicleState ego{0.0, 8.0, 0.5};
    const VehicleState lead{15.0, 10.0, 0.0};

    const LeadPrediction pred = predict_lead_horizon(lead, 0.0, cfg.h, model.dt);
    const QpSolution sol = solve_qp(assemble_qp(cfg, model, ego, pred));
    const MpcCommand cmd = mpc_target_speed(cfg, model, ego, lead, 0.0);
    CHECK(cmd.u_first == sol.u(0));

    // Reconstruct the emitted speed from u*(1) alone.
    const double look = cfg.command_lookahead;
    const double e = std::exp(-look / model.tau);
    const double expected = std::clamp(
        ego.v + model.tau * (1.0 - e) * ego.a +
            (model.tau * (e - 1.0) + look) * sol.u(0),
        cfg.v_min, cfg.v_max_limit);
    CHECK(cmd.v_mpc == expected);
}

TEST_CASE("repeated cycles are bit-identical") {
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);
    const MpcCommand a =
        mpc_target_speed(cfg, model, {0.0, 7.0, -1.0}, {12.0, 9.0, 0.0}, -2.0);
    const MpcCommand b =
        mpc_target_speed(cfg, model, {0.0, 7.0, -1.0}, {12.0, 9.0, 0.0}, -2.0);
    CHECK(a.v_mpc == b.v_mpc);
    CHECK(a.u_first == b.u_first);
}

TEST_CASE("solver stationarity holds on assembled instances") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> gap(2.0, 60.0);
    std::uniform_real_distribution<double> vel(0.0, 25.0);
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);

    for (int trial = 0; trial < 20; ++trial) {
        const VehicleState ego{0.0, vel(rng), 0.0};
        const VehicleState lead{gap(rng), vel(rng), 0.0};
        const LeadPrediction pred =
            predict_lead_horizon(lead, 0.0, cfg.h, model.dt);
        const QpProblem qp = assemble_qp(cfg, model, ego, pred);
        const QpSolution sol = solve_qp(qp);
        CHECK(sol.kkt_residual <= 1e-6);

        const double f_star = qp.cost(sol.u);
        for (int i = 0; i < cfg.h; ++i) {
            for (const double delta : {1e-3, -1e-3}) {
                Eigen::VectorXd u = sol.u;
                u(i) = std::clamp(u(i) + delta, qp.lb(i), qp.ub(i));
                CHECK(qp.cost(u) >= f_star - 1e-8);
            }
        }
    }
}

TEST_CASE("config invariants are enforced") {
    MpcConfig bad;
    bad.h = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = MpcConfig{};
    bad.r = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = MpcConfig{};
    bad.u_min = 3.0;  // must stay below u_max
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = MpcConfig{};
    bad.d_c = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = MpcConfig{};
    bad.q_v = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(MpcConfig{}.validate());
}

TEST_CASE("controller wrapper clamps the estimate and keeps a short buffer") {
    const MpcConfig cfg = experiment_config();
    const DiscreteModel model = discretize(0.3, 0.05);
    MpcController ctrl(cfg, model);

    // Feed a lead crashing to a stop far faster than the clamp.
    VehicleState lead{50.0, 30.0, 0.0};
    for (int k = 0; k < 6; ++k) {
        ctrl.update({0.0, 10.0, 0.0}, lead);
        lead.v = std::max(lead.v - 2.0, 0.0);  // -40 m/s^2 at dt = 0.05
    }
    CHECK(ctrl.lead_accel_estimate() == cfg.u_min);

    ctrl.reset();
    CHECK(ctrl.lead_accel_estimate() == 0.0);
}
