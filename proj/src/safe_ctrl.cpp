/**
 * @file safe_ctrl.cpp
 */

#include "hybridacc/safe_ctrl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridacc {

void SafeConfig::validate() const {
    if (levels.size() < 2) {
        throw std::invalid_argument("SafeConfig: need at least two levels");
    }
    if (levels.front() != 0.0) {
        throw std::invalid_argument("SafeConfig: first level must be 0");
    }
    for (size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1])) {
            throw std::invalid_argument(
                "SafeConfig: levels must be strictly increasing");
        }
    }
    if (!(a_nom > 0.0) || !(a_max > a_nom)) {
        throw std::invalid_argument("SafeConfig: need a_max > a_nom > 0");
    }
    if (reaction_time < 0.0) {
        throw std::invalid_argument("SafeConfig: reaction_time must be >= 0");
    }
}

double brake_distance(double v, double v_target, double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("brake_distance: rate must be > 0");
    }
    if (v_target < 0.0 || v < v_target) {
        throw std::invalid_argument("brake_distance: need v >= v_target >= 0");
    }
    return (v * v - v_target * v_target) / (2.0 * rate);
}

double accel_distance(double v, double v_target, double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("accel_distance: rate must be > 0");
    }
    if (v < 0.0 || v_target < v) {
        throw std::invalid_argument("accel_distance: need v_target >= v >= 0");
    }
    return (v_target * v_target - v * v) / (2.0 * rate);
}

SafeTable compute_bounds(const SafeConfig& cfg) {
    cfg.validate();
    const size_t n = cfg.levels.size();
    SafeTable table;
    table.B.resize(n);
    table.D.resize(n);
    table.B[0] = 0.0;
    table.D[0] = 0.0;
    for (size_t i = 1; i < n; ++i) {
        table.B[i] = brake_distance(cfg.levels[i], 0.0, cfg.a_nom);
        table.D[i] = accel_distance(cfg.levels[i - 1], cfg.levels[i], cfg.a_nom) +
                     table.B[i];
    }
    return table;
}

int control(double d, int level, const SafeTable& table) {
    const int n = table.top_level();
    if (level < n && d >= table.D[static_cast<size_t>(level) + 1]) {
        return level + 1;
    }
    if (level > 0 && d <= table.B[static_cast<size_t>(level)]) {
        return level - 1;
    }
    return level;
}

double v_max_speed(double d, double a_max) {
    if (!(a_max > 0.0)) {
        throw std::invalid_argument("v_max_speed: a_max must be > 0");
    }
    return std::sqrt(2.0 * a_max * std::max(d, 0.0));
}

double emergency_cap_speed(double d, double a_max, double t_react) {
    if (!(a_max > 0.0)) {
        throw std::invalid_argument("emergency_cap_speed: a_max must be > 0");
    }
    if (t_react < 0.0) {
        throw std::invalid_argument("emergency_cap_speed: t_react must be >= 0");
    }
    const double at = a_max * t_react;
    return std::sqrt(at * at + 2.0 * a_max * std::max(d, 0.0)) - at;
}

SafeController::SafeController(const SafeConfig& cfg)
    : cfg_(cfg), table_(compute_bounds(cfg)) {}

SafeOutput SafeController::compute(double d, double v_e) {
    d = std::max(d, 0.0);

    // Re-synchronize: largest level not exceeding the measured ego speed,
    // so the commanded level stays one step ahead of the plant at most.
    const auto it = std::upper_bound(cfg_.levels.begin(), cfg_.levels.end(),
                                     std::max(v_e, 0.0));
    const int measured =
        static_cast<int>(std::distance(cfg_.levels.begin(), it)) - 1;
    if (measured != level_) level_ = measured;

    level_ = control(d, level_, table_);

    SafeOutput out;
    out.level = level_;
    out.v_nominal = cfg_.levels[static_cast<size_t>(level_)];
    out.v_cap = emergency_cap_speed(d, cfg_.a_max, cfg_.reaction_time);
    out.cap_active = out.v_nominal > out.v_cap;
    out.v_safe = out.cap_active ? out.v_cap : out.v_nominal;
    return out;
}

}  // namespace hybridacc
