/**
 * @file hybrid.hpp
 * @brief Switch combining the adaptive and safe target speeds into one
 *        command, labeled with the policy that produced it.
 */

#ifndef HYBRIDACC_HYBRID_HPP
#define HYBRIDACC_HYBRID_HPP

namespace hybridacc {

enum class Policy { kMpc, kSafeNominal, kSafeMax };

const char* policy_name(Policy p);

struct SwitchDecision {
    double v_target = 0.0;
    Policy policy = Policy::kMpc;
};

/**
 * @brief Pick the highest candidate speed that stays under the emergency cap.
 *
 * Rules, applied in order:
 *   1. v_safe <= v_mpc <= v_max             -> (v_mpc, MPC)
 *   2. v_mpc <= v_safe                      -> (min(v_safe, v_max), SAFE_NOMINAL)
 *   3. otherwise (v_max <= v_mpc)           -> (v_max, SAFE_MAX)
 *
 * The result never exceeds v_max. Ties resolve toward the MPC label.
 */
SwitchDecision switch_speeds(double v_mpc, double v_safe, double v_max);

}  // namespace hybridacc

#endif  // HYBRIDACC_HYBRID_HPP
