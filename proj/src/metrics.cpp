/**
 * @file metrics.cpp
 */

#include "hybridacc/metrics.hpp"

#include <cmath>
#include <functional>

namespace hybridacc {

namespace {

/// Trapezoidal integral of f(row) over the trace time axis.
double integrate(const SimulationTrace& trace,
                 const std::function<double(const TraceRow&)>& f) {
    double sum = 0.0;
    for (size_t i = 0; i + 1 < trace.rows.size(); ++i) {
        const double dt = trace.rows[i + 1].t - trace.rows[i].t;
        sum += 0.5 * (f(trace.rows[i]) + f(trace.rows[i + 1])) * dt;
    }
    return sum;
}

double span(const SimulationTrace& trace) {
    return trace.rows.back().t - trace.rows.front().t;
}

void require_rows(const SimulationTrace& trace, size_t n, const char* who) {
    if (trace.rows.size() < n) {
        throw MetricError(std::string(who) + ": trace too short");
    }
}

}  // namespace

double performance(const SimulationTrace& trace) {
    require_rows(trace, 2, "performance");
    const double ego = integrate(trace, [](const TraceRow& r) { return r.v_e; });
    const double lead = integrate(trace, [](const TraceRow& r) { return r.v_a; });
    if (!(lead > 0.0)) {
        throw MetricError("performance: lead speed integral is zero");
    }
    return ego / lead;
}

double occupancy(const SimulationTrace& trace) {
    require_rows(trace, 2, "occupancy");
    for (const TraceRow& r : trace.rows) {
        if (r.d <= 0.0) {
            throw MetricError("occupancy: undefined on a collided trace");
        }
    }
    return integrate(trace, [](const TraceRow& r) { return 1.0 / r.d; }) /
           span(trace);
}

ComfortResult comfort(const SimulationTrace& trace) {
    require_rows(trace, 2, "comfort");
    const double t_sim = span(trace);
    const double mean =
        integrate(trace, [](const TraceRow& r) { return r.a_e; }) / t_sim;
    const double var = integrate(trace, [mean](const TraceRow& r) {
                           return (r.a_e - mean) * (r.a_e - mean);
                       }) /
                       t_sim;
    if (var < kComfortVarianceFloor) {
        return {1.0 / kComfortVarianceFloor, true};
    }
    return {1.0 / var, false};
}

PolicyUsage policy_usage(const SimulationTrace& trace) {
    require_rows(trace, 1, "policy_usage");
    PolicyUsage usage;
    for (const TraceRow& r : trace.rows) {
        switch (r.policy) {
            case Policy::kMpc:
                usage.mpc += 1.0;
                break;
            case Policy::kSafeNominal:
                usage.safe_nominal += 1.0;
                break;
            case Policy::kSafeMax:
                usage.safe_max += 1.0;
                break;
        }
    }
    const double n = static_cast<double>(trace.rows.size());
    usage.mpc /= n;
    usage.safe_nominal /= n;
    usage.safe_max /= n;
    return usage;
}

EfficiencyMetrics compute_metrics(const SimulationTrace& trace) {
    EfficiencyMetrics m;
    m.m_p = performance(trace);
    m.m_o = occupancy(trace);
    const ComfortResult c = comfort(trace);
    m.m_c = c.m_c;
    m.comfort_capped = c.capped;
    m.usage = policy_usage(trace);
    return m;
}

}  // namespace hybridacc
