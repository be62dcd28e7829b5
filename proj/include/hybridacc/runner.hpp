/**
 * @file runner.hpp
 * @brief Experiment-matrix execution and artifact emission: per-cell trace
 *        CSVs, per-scenario plot data, and the overall summary CSV.
 */

#ifndef HYBRIDACC_RUNNER_HPP
#define HYBRIDACC_RUNNER_HPP

#include <iosfwd>
#include <utility>
#include <vector>

#include "hybridacc/config.hpp"
#include "hybridacc/metrics.hpp"
#include "hybridacc/sim.hpp"

namespace hybridacc {

/// One scenario with the traces of every controller in the manifest.
struct ScenarioRun {
    ScenarioCell cell;
    std::vector<std::pair<ControllerKind, SimulationTrace>> traces;
};

/**
 * @brief Run every grid cell for every controller.
 *
 * Scenarios are dispatched to a bounded worker pool; runs share nothing and
 * the result order is the deterministic grid order regardless of the worker
 * count.
 */
std::vector<ScenarioRun> run_grid(const RunManifest& manifest, int workers = 1);

/**
 * @brief Execute the manifest and write all artifacts under
 *        manifest.out_dir: traces/, plots/, and summary.csv.
 *
 * Collisions are results, not errors. Returns 0 on success, 2 on I/O or
 * runtime failure (nothing partial is left of the summary).
 */
int run_matrix(const RunManifest& manifest, int workers, std::ostream& log);

/// Summary CSV for a completed grid (schema:
/// A,T,brake_rate,controller,collision_t,m_p,m_o,m_c,use_mpc,use_safe,use_vmax).
std::string summary_to_csv(const std::vector<ScenarioRun>& runs);

}  // namespace hybridacc

#endif  // HYBRIDACC_RUNNER_HPP
