/**
 * @file sim.hpp
 * @brief Scenario definitions, lead-vehicle profiles, the closed-loop
 *        fixed-step simulation, and collision detection.
 */

#ifndef HYBRIDACC_SIM_HPP
#define HYBRIDACC_SIM_HPP

#include <optional>
#include <string>
#include <vector>

#include "hybridacc/dynamics.hpp"
#include "hybridacc/hybrid.hpp"
#include "hybridacc/mpc.hpp"
#include "hybridacc/safe_ctrl.hpp"

namespace hybridacc {

/// Sudden-brake event: the lead decelerates at `rate` from t_brake on and
/// then stays stopped.
struct BrakeEvent {
    double rate = 12.0;   ///< deceleration magnitude [m/s^2]
    double t_brake = 30.0;
};

struct ScenarioConfig {
    double amplitude = 6.0;  ///< sinusoid amplitude A [m/s]
    double period = 10.0;    ///< sinusoid period T [s]
    double v_a0 = 12.0;      ///< lead base speed [m/s]
    std::optional<BrakeEvent> brake;
    double d0 = 10.0;      ///< initial gap [m]
    double ego_v0 = 0.0;   ///< initial ego speed [m/s]
    double t_sim = 60.0;   ///< simulated time [s]
    double dt = 0.05;      ///< control/simulation step [s]
    double tau = 0.3;      ///< ego actuator lag [s]
    double vehicle_length = 0.0;  ///< collision offset; 0 = point vehicles

    /// @throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Time constant of the low-level speed tracker [s].
inline constexpr double kTrackerTimeConstant = 0.5;

/**
 * @brief Lead state at time t: sinusoidal speed around the base value, with
 *        its analytic position integral; after the brake event, constant
 *        deceleration to a stop. Position starts at d0 (ego starts at 0).
 */
VehicleState lead_profile(double t, const ScenarioConfig& sc);

/// Proportional speed servo: clamp((v_target - v_e) / T_track, floor, ceil).
double speed_tracker(double v_target, double v_e, double u_floor, double u_ceil);

enum class ControllerKind { kMpc, kSafe, kHybrid };

const char* controller_name(ControllerKind kind);

struct TraceRow {
    double t = 0.0;
    double p_e = 0.0;
    double v_e = 0.0;
    double a_e = 0.0;
    double u_cmd = 0.0;
    double p_a = 0.0;
    double v_a = 0.0;
    double d = 0.0;
    double v_mpc = 0.0;
    double v_safe = 0.0;
    double v_max = 0.0;
    Policy policy = Policy::kMpc;
};

struct SimulationTrace {
    std::vector<TraceRow> rows;
    std::optional<double> collision_time;

    // Solver diagnostics accumulated over the run.
    double max_qp_residual = 0.0;
    int qp_not_converged = 0;
};

/**
 * @brief Closed-loop fixed-step run of one controller against one scenario.
 *
 * Every step computes and logs all three candidate speeds regardless of the
 * controller under test, converts the selected target through the speed
 * tracker, and propagates the ego plant with the exact discrete model.
 * Stops early when the gap reaches the collision threshold.
 *
 * @throws std::invalid_argument on configuration violations, before stepping.
 */
SimulationTrace run_simulation(const ScenarioConfig& sc, ControllerKind kind,
                               const MpcConfig& mpc_cfg,
                               const SafeConfig& safe_cfg);

/// Earliest time at which the gap is <= threshold, if any.
std::optional<double> detect_collision(const SimulationTrace& trace,
                                       double threshold = 0.0);

/// Trace CSV with the fixed column schema, LF line endings, 6 significant
/// digits.
std::string trace_to_csv(const SimulationTrace& trace);

}  // namespace hybridacc

#endif  // HYBRIDACC_SIM_HPP
