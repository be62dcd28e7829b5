/**
 * @file metrics.hpp
 * @brief Efficiency metrics and per-policy usage fractions over a trace.
 *
 * All integrals use the trapezoidal rule on the fixed-step trace.
 */

#ifndef HYBRIDACC_METRICS_HPP
#define HYBRIDACC_METRICS_HPP

#include <stdexcept>

#include "hybridacc/sim.hpp"

namespace hybridacc {

/// A metric is undefined for the given trace (collision, empty trace, ...).
class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Variance floor applied before taking the comfort reciprocal.
inline constexpr double kComfortVarianceFloor = 1e-9;

struct PolicyUsage {
    double mpc = 0.0;
    double safe_nominal = 0.0;
    double safe_max = 0.0;
};

struct ComfortResult {
    double m_c = 0.0;
    bool capped = false;  ///< variance hit the floor
};

/// Ratio of the ego speed integral to the lead speed integral.
/// @throws MetricError when the lead integral is not positive.
double performance(const SimulationTrace& trace);

/// Time-mean of the reciprocal gap 1/d.
/// @throws MetricError when any gap is <= 0 (collided trace).
double occupancy(const SimulationTrace& trace);

/// Reciprocal variance of the ego acceleration, floored before inversion.
/// @throws MetricError on an empty trace.
ComfortResult comfort(const SimulationTrace& trace);

/// Fraction of rows per policy label. Fractions sum to 1.
/// @throws MetricError on an empty trace.
PolicyUsage policy_usage(const SimulationTrace& trace);

struct EfficiencyMetrics {
    double m_p = 0.0;
    double m_o = 0.0;
    double m_c = 0.0;
    bool comfort_capped = false;
    PolicyUsage usage;
};

/// All metrics of a collision-free trace at once.
EfficiencyMetrics compute_metrics(const SimulationTrace& trace);

}  // namespace hybridacc

#endif  // HYBRIDACC_METRICS_HPP
