/**
 * @file sim.cpp
 * @brief Closed-loop simulation of one controller against one scenario.
 */

#include "hybridacc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace hybridacc {

void ScenarioConfig::validate() const {
    if (amplitude < 0.0) {
        throw std::invalid_argument("ScenarioConfig: amplitude must be >= 0");
    }
    if (!(period > 0.0)) {
        throw std::invalid_argument("ScenarioConfig: period must be > 0");
    }
    if (v_a0 < amplitude) {
        throw std::invalid_argument(
            "ScenarioConfig: v_a0 must be >= amplitude (lead never reverses)");
    }
    if (!(d0 > 0.0)) throw std::invalid_argument("ScenarioConfig: d0 must be > 0");
    if (ego_v0 < 0.0) {
        throw std::invalid_argument("ScenarioConfig: ego_v0 must be >= 0");
    }
    if (!(t_sim > 0.0)) {
        throw std::invalid_argument("ScenarioConfig: t_sim must be > 0");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("ScenarioConfig: dt must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("ScenarioConfig: tau must be > 0");
    if (vehicle_length < 0.0) {
        throw std::invalid_argument("ScenarioConfig: vehicle_length must be >= 0");
    }
    if (brake) {
        if (!(brake->rate > 0.0)) {
            throw std::invalid_argument("ScenarioConfig: brake rate must be > 0");
        }
        if (brake->t_brake < 0.0) {
            throw std::invalid_argument("ScenarioConfig: t_brake must be >= 0");
        }
    }
}

namespace {

VehicleState nominal_lead(double t, const ScenarioConfig& sc) {
    const double omega = 2.0 * std::numbers::pi / sc.period;
    VehicleState s;
    s.p = sc.d0 + sc.v_a0 * t + (sc.amplitude / omega) * (1.0 - std::cos(omega * t));
    s.v = sc.amplitude * std::sin(omega * t) + sc.v_a0;
    s.a = sc.amplitude * omega * std::cos(omega * t);
    return s;
}

}  // namespace

VehicleState lead_profile(double t, const ScenarioConfig& sc) {
    if (!sc.brake || t <= sc.brake->t_brake) return nominal_lead(t, sc);

    const VehicleState onset = nominal_lead(sc.brake->t_brake, sc);
    const double rate = sc.brake->rate;
    const double dt_after = t - sc.brake->t_brake;
    const double t_stop = onset.v / rate;
    if (dt_after >= t_stop) {
        // Stopped; stays stopped.
        return {onset.p + onset.v * onset.v / (2.0 * rate), 0.0, 0.0};
    }
    return {onset.p + onset.v * dt_after - 0.5 * rate * dt_after * dt_after,
            onset.v - rate * dt_after, -rate};
}

double speed_tracker(double v_target, double v_e, double u_floor, double u_ceil) {
    return std::clamp((v_target - v_e) / kTrackerTimeConstant, u_floor, u_ceil);
}

const char* controller_name(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::kMpc:
            return "mpc";
        case ControllerKind::kSafe:
            return "safe";
        case ControllerKind::kHybrid:
            return "hybrid";
    }
    return "unknown";
}

SimulationTrace run_simulation(const ScenarioConfig& sc, ControllerKind kind,
                               const MpcConfig& mpc_cfg,
                               const SafeConfig& safe_cfg) {
    sc.validate();
    mpc_cfg.validate();
    safe_cfg.validate();

    const DiscreteModel model = discretize(sc.tau, sc.dt);
    MpcController mpc_ctrl(mpc_cfg, model);
    SafeController safe_ctrl(safe_cfg);

    const int n_steps = static_cast<int>(std::llround(sc.t_sim / sc.dt));
    SimulationTrace trace;
    trace.rows.reserve(static_cast<size_t>(n_steps) + 1);

    VehicleState ego{0.0, sc.ego_v0, 0.0};
    const double coeff_a = model.A_d(1, 2);
    const double coeff_u = model.B_d(1);

    // Emergency-braking latch of the safe controller: engaged while the ego
    // speed sits on the reaction-compensated stopping envelope, released
    // with a small hysteresis. Pure adaptive runs have no such guard.
    bool emergency = false;
    constexpr double kEmergencyHysteresis = 0.3;

    for (int k = 0; k <= n_steps; ++k) {
        const double t = k * sc.dt;
        const VehicleState lead = lead_profile(t, sc);
        const double d = lead.p - ego.p;

        // All three candidates are computed and logged on every step.
        const MpcCommand mpc_cmd = mpc_ctrl.update(ego, lead);
        const SafeOutput safe_out = safe_ctrl.compute(d, ego.v);
        const double v_max = v_max_speed(d, safe_cfg.a_max);

        double target = 0.0;
        Policy policy = Policy::kMpc;
        switch (kind) {
            case ControllerKind::kMpc:
                target = mpc_cmd.v_mpc;
                policy = Policy::kMpc;
                break;
            case ControllerKind::kSafe:
                target = safe_out.v_safe;
                policy = safe_out.cap_active ? Policy::kSafeMax
                                             : Policy::kSafeNominal;
                break;
            case ControllerKind::kHybrid: {
                const SwitchDecision dec =
                    switch_speeds(mpc_cmd.v_mpc, safe_out.v_safe, v_max);
                target = dec.v_target;
                policy = dec.policy;
                break;
            }
        }

        if (kind != ControllerKind::kMpc) {
            if (ego.v >= safe_out.v_cap) {
                emergency = true;
            } else if (ego.v <= safe_out.v_cap - kEmergencyHysteresis) {
                emergency = false;
            }
        }

        const double u_floor =
            (policy == Policy::kSafeMax || emergency) ? -safe_cfg.a_max
                                                      : -safe_cfg.a_nom;
        double u = speed_tracker(target, ego.v, u_floor, safe_cfg.a_nom);
        if (emergency) u = -safe_cfg.a_max;

        // The plant never reverses: floor the input so the next speed stays
        // at or above zero.
        const double u_stop = -(ego.v + coeff_a * ego.a) / coeff_u;
        if (u < u_stop) u = u_stop;

        trace.rows.push_back({t, ego.p, ego.v, ego.a, u, lead.p, lead.v, d,
                              mpc_cmd.v_mpc, safe_out.v_safe, v_max, policy});
        trace.max_qp_residual =
            std::max(trace.max_qp_residual, mpc_cmd.kkt_residual);
        if (!mpc_cmd.converged) ++trace.qp_not_converged;

        if (d <= sc.vehicle_length) {
            trace.collision_time = t;
            break;
        }
        if (k == n_steps) break;

        ego = step(model, ego, u);
        if (ego.v < 0.0 && ego.v > -1e-12) ego.v = 0.0;
    }
    return trace;
}

std::optional<double> detect_collision(const SimulationTrace& trace,
                                       double threshold) {
    for (const TraceRow& row : trace.rows) {
        if (row.d <= threshold) return row.t;
    }
    return std::nullopt;
}

std::string trace_to_csv(const SimulationTrace& trace) {
    std::string out = "t,p_e,v_e,a_e,u_cmd,p_a,v_a,d,v_mpc,v_safe,v_max,policy\n";
    char buf[320];
    for (const TraceRow& r : trace.rows) {
        std::snprintf(buf, sizeof buf,
                      "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%s\n",
                      r.t, r.p_e, r.v_e, r.a_e, r.u_cmd, r.p_a, r.v_a, r.d,
                      r.v_mpc, r.v_safe, r.v_max, policy_name(r.policy));
        out += buf;
    }
    return out;
}

}  // namespace hybridacc
