/**
 * @file dynamics.hpp
 * @brief Longitudinal vehicle model with first-order actuator lag and its
 *        exact zero-order-hold discretization.
 */

#ifndef HYBRIDACC_DYNAMICS_HPP
#define HYBRIDACC_DYNAMICS_HPP

#include <Eigen/Dense>

namespace hybridacc {

/**
 * @brief Longitudinal state of one vehicle: position, speed, acceleration.
 *
 * Continuous dynamics of the controlled vehicle:
 *     dp/dt = v
 *     dv/dt = a
 *     da/dt = (u - a) / tau
 * where u is the commanded acceleration and tau the actuator lag constant.
 */
struct VehicleState {
    double p = 0.0;  ///< position [m]
    double v = 0.0;  ///< speed [m/s]
    double a = 0.0;  ///< acceleration [m/s^2]

    Eigen::Vector3d to_vector() const { return {p, v, a}; }
    static VehicleState from_vector(const Eigen::Vector3d& x) {
        return {x(0), x(1), x(2)};
    }
    bool finite() const;
};

/**
 * @brief Exact discrete-time model x(k+1) = A_d x(k) + B_d u(k).
 *
 * A_d and B_d are the closed-form ZOH discretization of the lagged
 * triple-integrator above; no integration error is introduced.
 */
struct DiscreteModel {
    double dt = 0.0;   ///< sampling step [s]
    double tau = 0.0;  ///< actuator lag constant [s]
    Eigen::Matrix3d A_d;
    Eigen::Vector3d B_d;
};

/**
 * @brief Build the exact discretization for a given lag and step.
 * @throws std::invalid_argument if tau <= 0 or dt <= 0.
 */
DiscreteModel discretize(double tau, double dt);

/// Propagate one step: A_d * x + B_d * u.
VehicleState step(const DiscreteModel& model, const VehicleState& x, double u);

}  // namespace hybridacc

#endif  // HYBRIDACC_DYNAMICS_HPP
