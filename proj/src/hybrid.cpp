/**
 * @file hybrid.cpp
 */

#include "hybridacc/hybrid.hpp"

#include <algorithm>

namespace hybridacc {

const char* policy_name(Policy p) {
    switch (p) {
        case Policy::kMpc:
            return "MPC";
        case Policy::kSafeNominal:
            return "SAFE_NOMINAL";
        case Policy::kSafeMax:
            return "SAFE_MAX";
    }
    return "UNKNOWN";
}

SwitchDecision switch_speeds(double v_mpc, double v_safe, double v_max) {
    if (v_safe <= v_mpc && v_mpc <= v_max) {
        return {v_mpc, Policy::kMpc};
    }
    if (v_mpc <= v_safe) {
        return {std::min(v_safe, v_max), Policy::kSafeNominal};
    }
    return {v_max, Policy::kSafeMax};
}

}  // namespace hybridacc
