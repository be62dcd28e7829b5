/**
 * @file mpc.cpp
 * @brief Condensed QP assembly and the receding-horizon control cycle.
 */

#include "hybridacc/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridacc {

void MpcConfig::validate() const {
    if (h < 1) throw std::invalid_argument("MpcConfig: h must be >= 1");
    if (q_p < 0.0 || q_v < 0.0 || q_a < 0.0) {
        throw std::invalid_argument("MpcConfig: state weights must be >= 0");
    }
    if (!(r > 0.0)) throw std::invalid_argument("MpcConfig: r must be > 0");
    if (!(u_min < u_max)) {
        throw std::invalid_argument("MpcConfig: u_min must be < u_max");
    }
    if (!(v_min < v_max_limit)) {
        throw std::invalid_argument("MpcConfig: v_min must be < v_max_limit");
    }
    if (!(d_c > 0.0)) throw std::invalid_argument("MpcConfig: d_c must be > 0");
    if (accel_window < 1) {
        throw std::invalid_argument("MpcConfig: accel_window must be >= 1");
    }
    if (!(command_lookahead > 0.0)) {
        throw std::invalid_argument("MpcConfig: command_lookahead must be > 0");
    }
    if (!(slack_weight >= 0.0)) {
        throw std::invalid_argument("MpcConfig: slack_weight must be >= 0");
    }
    if (prediction_dt < 0.0) {
        throw std::invalid_argument("MpcConfig: prediction_dt must be >= 0");
    }
}

double predict_lead(const VehicleState& lead, double a_a, int k, double dt) {
    const double t = k * dt;
    if (a_a < 0.0) {
        if (lead.v <= 0.0) return lead.p;  // already stopped, never reverses
        const double t_stop = lead.v / (-a_a);
        if (t >= t_stop) {
            return lead.p + lead.v * lead.v / (2.0 * (-a_a));
        }
    }
    return lead.p + lead.v * t + 0.5 * a_a * t * t;
}

LeadPrediction predict_lead_horizon(const VehicleState& lead, double a_a, int h,
                                    double dt) {
    LeadPrediction out;
    out.p.resize(static_cast<size_t>(h));
    out.v.resize(static_cast<size_t>(h));
    out.a.resize(static_cast<size_t>(h));
    for (int k = 1; k <= h; ++k) {
        const size_t i = static_cast<size_t>(k - 1);
        out.p[i] = predict_lead(lead, a_a, k, dt);
        double v = lead.v + a_a * k * dt;
        if (a_a < 0.0) v = std::max(v, 0.0);
        out.v[i] = v;
        out.a[i] = (a_a < 0.0 && v <= 0.0) ? 0.0 : a_a;
    }
    return out;
}

AccelEstimate estimate_lead_accel(std::span<const double> v_history, double dt) {
    const size_t m = v_history.size();
    if (m < 2) return {0.0, true};

    // Least-squares slope over sample index, rescaled by dt.
    const double n = static_cast<double>(m);
    double sum_v = 0.0;
    for (const double v : v_history) sum_v += v;
    const double mean_i = (n - 1.0) / 2.0;
    const double mean_v = sum_v / n;
    double num = 0.0;
    double den = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double di = static_cast<double>(i) - mean_i;
        num += di * (v_history[i] - mean_v);
        den += di * di;
    }
    return {num / (den * dt), false};
}

QpProblem assemble_qp(const MpcConfig& cfg, const DiscreteModel& model,
                      const VehicleState& ego, const LeadPrediction& lead) {
    cfg.validate();
    const int h = cfg.h;
    const size_t hs = static_cast<size_t>(h);
    if (lead.p.size() != hs || lead.v.size() != hs || lead.a.size() != hs) {
        throw std::invalid_argument("assemble_qp: lead arrays must have length h");
    }

    std::vector<Eigen::Matrix3d> Apow(hs + 1);
    Apow[0].setIdentity();
    for (size_t k = 1; k <= hs; ++k) Apow[k] = Apow[k - 1] * model.A_d;

    // x(k) = Apow[k] x0 + sum_{j<k} Apow[k-1-j] B u_j
    Eigen::MatrixXd Su = Eigen::MatrixXd::Zero(3 * h, h);
    for (int k = 1; k <= h; ++k) {
        for (int j = 0; j < k; ++j) {
            Su.block<3, 1>(3 * (k - 1), j) =
                Apow[static_cast<size_t>(k - 1 - j)] * model.B_d;
        }
    }

    // Tracking error of the free response: w = ref - Apow[k] x0.
    const Eigen::Vector3d x0 = ego.to_vector();
    Eigen::VectorXd w(3 * h);
    for (int k = 1; k <= h; ++k) {
        const size_t i = static_cast<size_t>(k - 1);
        const Eigen::Vector3d ref(lead.p[i] - cfg.d_c, lead.v[i], lead.a[i]);
        w.segment<3>(3 * (k - 1)) = ref - Apow[static_cast<size_t>(k)] * x0;
    }

    Eigen::VectorXd q_bar(3 * h);
    for (int k = 0; k < h; ++k) {
        q_bar.segment<3>(3 * k) = Eigen::Vector3d(cfg.q_p, cfg.q_v, cfg.q_a);
    }

    const Eigen::MatrixXd QSu = q_bar.asDiagonal() * Su;

    QpProblem qp;
    qp.H = 2.0 * (Su.transpose() * QSu +
                  cfg.r * Eigen::MatrixXd::Identity(h, h));
    qp.H = 0.5 * (qp.H + qp.H.transpose());
    qp.g = -2.0 * QSu.transpose() * w;
    qp.cost_offset = w.dot(q_bar.asDiagonal() * w);
    qp.lb = Eigen::VectorXd::Constant(h, cfg.u_min);
    qp.ub = Eigen::VectorXd::Constant(h, cfg.u_max);

    // Softened speed corridor: v_min <= v(k) <= v_max_limit.
    qp.C.resize(h, h);
    qp.c_lo.resize(h);
    qp.c_hi.resize(h);
    for (int k = 1; k <= h; ++k) {
        qp.C.row(k - 1) = Su.row(3 * (k - 1) + 1);
        const double v_free = (Apow[static_cast<size_t>(k)] * x0)(1);
        qp.c_lo(k - 1) = cfg.v_min - v_free;
        qp.c_hi(k - 1) = cfg.v_max_limit - v_free;
    }
    qp.slack_weight = cfg.slack_weight;
    return qp;
}

namespace {

/// Ego speed `lookahead` seconds ahead under a constant input, through the
/// exact lagged model.
double speed_after(const DiscreteModel& model, const VehicleState& ego,
                   double u, double lookahead) {
    const double e = std::exp(-lookahead / model.tau);
    const double coeff_a = model.tau * (1.0 - e);
    const double coeff_u = model.tau * (e - 1.0) + lookahead;
    return ego.v + coeff_a * ego.a + coeff_u * u;
}

}  // namespace

MpcCommand mpc_target_speed(const MpcConfig& cfg, const DiscreteModel& model,
                            const VehicleState& ego, const VehicleState& lead,
                            double a_a) {
    // The prediction grid may be coarser than the plant step; the first
    // optimal input is still applied for one plant step only.
    const DiscreteModel pred_model =
        (cfg.prediction_dt > 0.0 && cfg.prediction_dt != model.dt)
            ? discretize(model.tau, cfg.prediction_dt)
            : model;
    const LeadPrediction pred =
        predict_lead_horizon(lead, a_a, cfg.h, pred_model.dt);
    const QpProblem qp = assemble_qp(cfg, pred_model, ego, pred);
    const QpSolution sol = solve_qp(qp);

    MpcCommand cmd;
    cmd.u_first = sol.u(0);
    cmd.v_mpc = std::clamp(speed_after(model, ego, cmd.u_first,
                                       cfg.command_lookahead),
                           cfg.v_min, cfg.v_max_limit);
    cmd.converged = sol.converged;
    cmd.kkt_residual = sol.kkt_residual;
    return cmd;
}

MpcController::MpcController(const MpcConfig& cfg, const DiscreteModel& model)
    : cfg_(cfg), model_(model) {
    cfg_.validate();
    lead_speeds_.reserve(static_cast<size_t>(cfg_.accel_window));
}

double MpcController::lead_accel_estimate() const {
    const AccelEstimate est = estimate_lead_accel(lead_speeds_, model_.dt);
    return std::clamp(est.value, cfg_.u_min, cfg_.u_max);
}

MpcCommand MpcController::update(const VehicleState& ego,
                                 const VehicleState& lead) {
    if (lead_speeds_.size() == static_cast<size_t>(cfg_.accel_window)) {
        lead_speeds_.erase(lead_speeds_.begin());
    }
    lead_speeds_.push_back(lead.v);
    return mpc_target_speed(cfg_, model_, ego, lead, lead_accel_estimate());
}

void MpcController::reset() { lead_speeds_.clear(); }

}  // namespace hybridacc
