/**
 * @file dynamics.cpp
 * @brief Exact ZOH discretization of the lagged longitudinal model.
 */

#include "hybridacc/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridacc {

bool VehicleState::finite() const {
    return std::isfinite(p) && std::isfinite(v) && std::isfinite(a);
}

DiscreteModel discretize(double tau, double dt) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("discretize: tau must be positive");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("discretize: dt must be positive");
    }

    const double e = std::exp(-dt / tau);

    DiscreteModel m;
    m.dt = dt;
    m.tau = tau;
    m.A_d << 1.0, dt, tau * tau * (e - 1.0) + dt * tau,
             0.0, 1.0, tau * (1.0 - e),
             0.0, 0.0, e;
    m.B_d << tau * tau * (1.0 - e) + 0.5 * dt * dt - dt * tau,
             tau * (e - 1.0) + dt,
             1.0 - e;
    return m;
}

VehicleState step(const DiscreteModel& model, const VehicleState& x, double u) {
    return VehicleState::from_vector(model.A_d * x.to_vector() +
                                     model.B_d * u);
}

}  // namespace hybridacc
