#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>

#include "hybridacc/hybrid.hpp"

using hybridacc::Policy;
using hybridacc::SwitchDecision;
using hybridacc::policy_name;
using hybridacc::switch_speeds;

TEST_CASE("the three selection rules") {
    const SwitchDecision track = switch_speeds(12.0, 10.0, 15.0);
    CHECK(track.v_target == 12.0);
    CHECK(track.policy == Policy::kMpc);

    const SwitchDecision lift = switch_speeds(8.0, 10.0, 15.0);
    CHECK(lift.v_target == 10.0);
    CHECK(lift.policy == Policy::kSafeNominal);

    const SwitchDecision cap = switch_speeds(20.0, 10.0, 15.0);
    CHECK(cap.v_target == 15.0);
    CHECK(cap.policy == Policy::kSafeMax);
}

TEST_CASE("ties resolve toward the adaptive label") {
    CHECK(switch_speeds(10.0, 10.0, 10.0).policy == Policy::kMpc);
    CHECK(switch_speeds(10.0, 10.0, 15.0).policy == Policy::kMpc);
    CHECK(switch_speeds(15.0, 10.0, 15.0).policy == Policy::kMpc);
}

TEST_CASE("output never exceeds the cap") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> speed(0.0, 40.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double v_max = speed(rng);
        const SwitchDecision dec = switch_speeds(speed(rng), speed(rng), v_max);
        CHECK(dec.v_target <= v_max);
        CHECK(dec.v_target >= 0.0);
    }
}

TEST_CASE("picks the highest candidate under the cap") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> speed(0.0, 40.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double v_max = speed(rng);
        const double v_mpc = speed(rng);
        std::uniform_real_distribution<double> safe_range(0.0, v_max);
        const double v_safe = safe_range(rng);  // published value <= cap
        const SwitchDecision dec = switch_speeds(v_mpc, v_safe, v_max);
        const double expected =
            std::max(std::min(v_mpc, v_max), std::min(v_safe, v_max));
        CHECK(dec.v_target == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("label is MPC exactly when the adaptive speed wins") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> speed(0.0, 40.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double v_mpc = speed(rng);
        const double v_safe = speed(rng);
        const double v_max = speed(rng);
        const SwitchDecision dec = switch_speeds(v_mpc, v_safe, v_max);
        const bool mpc_label = dec.policy == Policy::kMpc;
        const bool mpc_wins = dec.v_target == v_mpc && v_mpc >= v_safe;
        CHECK(mpc_label == mpc_wins);
    }
}

TEST_CASE("transient corner: nominal target above the cap stays capped") {
    // Possible only when the published safe speed momentarily exceeds the
    // cap; the clamp keeps the hard ceiling.
    const SwitchDecision dec = switch_speeds(5.0, 20.0, 15.0);
    CHECK(dec.v_target == 15.0);
    CHECK(dec.policy == Policy::kSafeNominal);
}

TEST_CASE("policy names are stable identifiers") {
    CHECK(std::string(policy_name(Policy::kMpc)) == "MPC");
    CHECK(std::string(policy_name(Policy::kSafeNominal)) == "SAFE_NOMINAL");
    CHECK(std::string(policy_name(Policy::kSafeMax)) == "SAFE_MAX");
}
