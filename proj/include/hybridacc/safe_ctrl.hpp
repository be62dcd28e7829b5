/**
 * @file safe_ctrl.hpp
 * @brief Discrete safe controller: braking/acceleration distance functions,
 *        precomputed per-level bounds, the level automaton, and the
 *        emergency speed caps.
 */

#ifndef HYBRIDACC_SAFE_CTRL_HPP
#define HYBRIDACC_SAFE_CTRL_HPP

#include <vector>

namespace hybridacc {

struct SafeConfig {
    /// Strictly increasing speed levels, first level 0.
    std::vector<double> levels = {0, 4, 8, 12, 16, 20, 24, 28, 32};
    double a_nom = 3.0;   ///< nominal accel/decel magnitude [m/s^2]
    double a_max = 12.0;  ///< emergency decel magnitude [m/s^2]

    /// Actuation pipeline delay compensated by the emergency cap [s].
    /// Covers the speed-tracker constant plus the actuator lag.
    double reaction_time = 0.6;

    /// @throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/**
 * @brief Per-level distance bounds.
 *
 * B[i] is the distance needed to brake from level i to a stop; D[i] the
 * distance needed to climb from level i-1 to i and then brake to a stop.
 * D[0] is unused and stored as 0.
 */
struct SafeTable {
    std::vector<double> B;
    std::vector<double> D;
    int top_level() const { return static_cast<int>(B.size()) - 1; }
};

/**
 * @brief Distance covered braking from v down to v_target at a constant rate.
 * @throws std::invalid_argument if v < v_target or preconditions fail.
 */
double brake_distance(double v, double v_target, double rate);

/**
 * @brief Distance covered accelerating from v up to v_target at a constant
 *        rate.
 * @throws std::invalid_argument if v_target < v or preconditions fail.
 */
double accel_distance(double v, double v_target, double rate);

/// Precompute the per-level bounds for a configuration.
SafeTable compute_bounds(const SafeConfig& cfg);

/**
 * @brief One automaton transition: climb when the gap clears the next
 *        acceleration bound, drop when it reaches the braking bound of the
 *        current level, stay otherwise. Moves at most one level per call.
 */
int control(double d, int level, const SafeTable& table);

/// Highest speed from which a stop at decel a_max fits inside gap d.
double v_max_speed(double d, double a_max);

/**
 * @brief Highest speed that still stops within gap d when braking starts
 *        only after t_react seconds: v t_react + v^2 / (2 a_max) <= d.
 *
 * Equals v_max_speed when t_react is 0, and is strictly below it otherwise.
 */
double emergency_cap_speed(double d, double a_max, double t_react);

struct SafeOutput {
    double v_safe = 0.0;     ///< published target: min(v_nominal, v_cap)
    double v_nominal = 0.0;  ///< speed of the commanded level
    double v_cap = 0.0;      ///< reaction-compensated emergency cap
    bool cap_active = false; ///< the cap bound the nominal target
    int level = 0;
};

/**
 * @brief The level automaton over the ego speed and the free gap ahead.
 *
 * Carries the current level as its only state. The stored level
 * re-synchronizes to the measured speed whenever they disagree, then the
 * transition rule applies, so the commanded level never runs more than one
 * step ahead of the plant. One instance per simulation.
 */
class SafeController {
public:
    explicit SafeController(const SafeConfig& cfg);

    SafeOutput compute(double d, double v_e);

    void reset() { level_ = 0; }
    const SafeTable& table() const { return table_; }
    const SafeConfig& config() const { return cfg_; }
    int level() const { return level_; }

private:
    SafeConfig cfg_;
    SafeTable table_;
    int level_ = 0;
};

}  // namespace hybridacc

#endif  // HYBRIDACC_SAFE_CTRL_HPP
