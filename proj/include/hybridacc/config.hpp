/**
 * @file config.hpp
 * @brief Run manifest and the key-value configuration file parser.
 *
 * Config files are flat INI-style text with four sections:
 *
 *     [scenario]  A, T, brake_rates, nominal, v_a0, d0, ego_v0, t_brake,
 *                 vehicle_length
 *     [mpc]       h, q_p, q_v, q_a, r, d_c, u_min, u_max, v_min,
 *                 v_max_limit, slack_weight, accel_window, command_lookahead
 *     [safe]      levels, a_nom, a_max
 *     [sim]       dt, t_sim, tau
 *
 * Scalar values are numbers or true/false; list values use brackets, e.g.
 * `A = [6, 9, 12]`. Missing keys fall back to the built-in defaults; unknown
 * keys or sections are errors.
 */

#ifndef HYBRIDACC_CONFIG_HPP
#define HYBRIDACC_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "hybridacc/mpc.hpp"
#include "hybridacc/safe_ctrl.hpp"
#include "hybridacc/sim.hpp"

namespace hybridacc {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                            message
                                      : message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

struct RunManifest {
    std::vector<double> amplitudes = {6.0, 9.0, 12.0};
    std::vector<double> periods = {10.0, 20.0, 30.0};
    std::vector<double> brake_rates = {4.0, 8.0, 12.0};
    bool include_nominal = true;
    double t_brake = 30.0;  ///< brake onset used by the out-of-nominal cells

    std::vector<ControllerKind> controllers = {
        ControllerKind::kMpc, ControllerKind::kSafe, ControllerKind::kHybrid};

    std::string out_dir = "out";

    ScenarioConfig scenario;  ///< grid cells override amplitude/period/brake
    MpcConfig mpc;
    SafeConfig safe;

    /// @throws ConfigError when the grid is empty or a sub-config invariant
    /// fails.
    void validate() const;
};

/// Manifest with every key at its built-in default.
RunManifest default_manifest();

/// Parse a config file into a manifest (defaults plus overrides).
/// @throws ConfigError with a line number on malformed input, unknown keys,
/// or invariant violations.
RunManifest parse_config(const std::string& path);

/// One cell of the scenario grid.
struct ScenarioCell {
    ScenarioConfig scenario;
    std::string id;  ///< e.g. "A6_T10_nominal" or "A6_T10_brake12"
};

/// Expand the manifest grid in deterministic order: the nominal block
/// first, then one block per brake rate.
std::vector<ScenarioCell> expand_grid(const RunManifest& manifest);

}  // namespace hybridacc

#endif  // HYBRIDACC_CONFIG_HPP
