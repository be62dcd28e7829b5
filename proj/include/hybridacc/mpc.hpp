/**
 * @file mpc.hpp
 * @brief Receding-horizon speed controller: lead-vehicle prediction,
 *        condensed QP assembly over the input sequence, and conversion of
 *        the optimal first input into a target speed.
 */

#ifndef HYBRIDACC_MPC_HPP
#define HYBRIDACC_MPC_HPP

#include <span>
#include <vector>

#include "hybridacc/dynamics.hpp"
#include "hybridacc/qp.hpp"

namespace hybridacc {

struct MpcConfig {
    int h = 10;          ///< prediction horizon [steps]
    double q_p = 50.0;   ///< weight on gap error
    double q_v = 400.0;  ///< weight on speed error
    double q_a = 1.0;    ///< weight on acceleration error
    double r = 1.0;      ///< weight on the input
    double d_c = 20.0;   ///< desired gap [m]
    double u_min = -12.0;
    double u_max = 3.0;
    double v_min = 0.0;
    double v_max_limit = 32.0;       ///< speed bound inside the optimization
    double slack_weight = 1e4;       ///< penalty weight on softened speed bounds
    int accel_window = 5;            ///< samples for the lead-accel estimate
    double command_lookahead = 0.5;  ///< horizon [s] for the u -> speed conversion;
                                     ///< matched to the speed tracker constant
    double prediction_dt = 0.1;      ///< step of the h-step prediction grid [s];
                                     ///< 0 falls back to the plant step

    /// @throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/**
 * @brief Predicted lead position k steps ahead under constant acceleration.
 *
 * The lead never reverses: once the predicted speed reaches zero the
 * position is frozen at the stopping point.
 */
double predict_lead(const VehicleState& lead, double a_a, int k, double dt);

/// Lead trajectory sampled at steps 1..h, with the same stop clamping.
struct LeadPrediction {
    std::vector<double> p;
    std::vector<double> v;
    std::vector<double> a;
};
LeadPrediction predict_lead_horizon(const VehicleState& lead, double a_a, int h,
                                    double dt);

struct AccelEstimate {
    double value = 0.0;
    bool cold_start = false;  ///< fewer than 2 samples available
};

/// Least-squares slope of a speed history sampled at spacing dt.
AccelEstimate estimate_lead_accel(std::span<const double> v_history, double dt);

/**
 * @brief Condense the horizon-h tracking cost into a QP over the inputs.
 *
 * States are eliminated through the prediction matrices of the discrete
 * model; input bounds stay hard while speed bounds become penalty rows.
 * @throws std::invalid_argument if the lead arrays do not have length h.
 */
QpProblem assemble_qp(const MpcConfig& cfg, const DiscreteModel& model,
                      const VehicleState& ego, const LeadPrediction& lead);

struct MpcCommand {
    double v_mpc = 0.0;       ///< target speed
    double u_first = 0.0;     ///< first optimal input
    bool converged = true;    ///< solver met its stationarity tolerance
    double kkt_residual = 0.0;
};

/**
 * @brief One receding-horizon cycle: predict the lead, solve the QP, apply
 *        the first input, and emit the resulting target speed clamped to
 *        [v_min, v_max_limit].
 */
MpcCommand mpc_target_speed(const MpcConfig& cfg, const DiscreteModel& model,
                            const VehicleState& ego, const VehicleState& lead,
                            double a_a);

/**
 * @brief Stateful wrapper owning the lead-speed history buffer.
 *
 * One instance per simulation; instances are independent.
 */
class MpcController {
public:
    MpcController(const MpcConfig& cfg, const DiscreteModel& model);

    /// Record the current lead speed and run one control cycle.
    MpcCommand update(const VehicleState& ego, const VehicleState& lead);

    /// Lead-acceleration estimate from the current history, clamped to the
    /// input bounds.
    double lead_accel_estimate() const;

    void reset();

    const MpcConfig& config() const { return cfg_; }
    const DiscreteModel& model() const { return model_; }

private:
    MpcConfig cfg_;
    DiscreteModel model_;
    std::vector<double> lead_speeds_;
};

}  // namespace hybridacc

#endif  // HYBRIDACC_MPC_HPP
