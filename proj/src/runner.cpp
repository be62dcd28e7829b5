/**
 * @file runner.cpp
 */

#include "hybridacc/runner.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace hybridacc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double brake_rate_of(const ScenarioCell& cell) {
    return cell.scenario.brake ? cell.scenario.brake->rate : 0.0;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
        throw std::runtime_error("failed to write " + path.string());
    }
}

std::string plot_speed_csv(const ScenarioRun& run) {
    std::string header = "t,v_a";
    size_t longest = 0;
    bool have_hybrid = false;
    for (const auto& [kind, trace] : run.traces) {
        header += std::string(",v_e_") + controller_name(kind);
        longest = std::max(longest, trace.rows.size());
        if (kind == ControllerKind::kHybrid) have_hybrid = true;
    }
    if (have_hybrid) header += ",v_max_hybrid";
    std::string out = header + "\n";

    const double dt = run.cell.scenario.dt;
    for (size_t i = 0; i < longest; ++i) {
        out += fmt(static_cast<double>(i) * dt);
        out += "," + fmt(lead_profile(static_cast<double>(i) * dt,
                                      run.cell.scenario)
                             .v);
        std::string hybrid_vmax;
        for (const auto& [kind, trace] : run.traces) {
            out += ",";
            if (i < trace.rows.size()) {
                out += fmt(trace.rows[i].v_e);
                if (kind == ControllerKind::kHybrid) {
                    hybrid_vmax = fmt(trace.rows[i].v_max);
                }
            }
        }
        if (have_hybrid) out += "," + hybrid_vmax;
        out += "\n";
    }
    return out;
}

std::string plot_distance_csv(const ScenarioRun& run) {
    std::string header = "t";
    size_t longest = 0;
    for (const auto& [kind, trace] : run.traces) {
        header += std::string(",d_") + controller_name(kind);
        longest = std::max(longest, trace.rows.size());
    }
    std::string out = header + "\n";

    const double dt = run.cell.scenario.dt;
    for (size_t i = 0; i < longest; ++i) {
        out += fmt(static_cast<double>(i) * dt);
        for (const auto& [kind, trace] : run.traces) {
            out += ",";
            if (i < trace.rows.size()) out += fmt(trace.rows[i].d);
        }
        out += "\n";
    }
    return out;
}

}  // namespace

std::vector<ScenarioRun> run_grid(const RunManifest& manifest, int workers) {
    manifest.validate();
    const std::vector<ScenarioCell> cells = expand_grid(manifest);
    std::vector<ScenarioRun> runs(cells.size());

    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                ScenarioRun run;
                run.cell = cells[i];
                for (const ControllerKind kind : manifest.controllers) {
                    run.traces.emplace_back(
                        kind, run_simulation(cells[i].scenario, kind,
                                             manifest.mpc, manifest.safe));
                }
                runs[i] = std::move(run);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_workers =
        std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return runs;
}

std::string summary_to_csv(const std::vector<ScenarioRun>& runs) {
    std::string out =
        "A,T,brake_rate,controller,collision_t,m_p,m_o,m_c,"
        "use_mpc,use_safe,use_vmax\n";
    for (const ScenarioRun& run : runs) {
        for (const auto& [kind, trace] : run.traces) {
            out += fmt(run.cell.scenario.amplitude);
            out += "," + fmt(run.cell.scenario.period);
            out += "," + fmt(brake_rate_of(run.cell));
            out += std::string(",") + controller_name(kind);
            out += ",";
            if (trace.collision_time) out += fmt(*trace.collision_time);
            if (trace.collision_time) {
                out += ",,,";  // efficiency metrics are undefined
            } else {
                const EfficiencyMetrics m = compute_metrics(trace);
                out += "," + fmt(m.m_p) + "," + fmt(m.m_o) + "," + fmt(m.m_c);
            }
            const PolicyUsage usage = policy_usage(trace);
            out += "," + fmt(usage.mpc) + "," + fmt(usage.safe_nominal) + "," +
                   fmt(usage.safe_max);
            out += "\n";
        }
    }
    return out;
}

int run_matrix(const RunManifest& manifest, int workers, std::ostream& log) {
    namespace fs = std::filesystem;
    try {
        const fs::path out_dir(manifest.out_dir);
        fs::create_directories(out_dir / "traces");
        fs::create_directories(out_dir / "plots");

        const std::vector<ScenarioRun> runs = run_grid(manifest, workers);

        for (const ScenarioRun& run : runs) {
            for (const auto& [kind, trace] : run.traces) {
                const std::string name =
                    "trace_" + run.cell.id + "_" + controller_name(kind) + ".csv";
                write_file(out_dir / "traces" / name, trace_to_csv(trace));

                log << run.cell.id << " " << controller_name(kind);
                if (trace.collision_time) {
                    log << ": collision at t=" << fmt(*trace.collision_time);
                } else {
                    const EfficiencyMetrics m = compute_metrics(trace);
                    log << ": m_p=" << fmt(m.m_p) << " m_o=" << fmt(m.m_o)
                        << " m_c=" << fmt(m.m_c)
                        << (m.comfort_capped ? " (capped)" : "");
                }
                log << "\n";
            }
            write_file(out_dir / "plots" / ("speed_" + run.cell.id + ".csv"),
                       plot_speed_csv(run));
            write_file(out_dir / "plots" / ("distance_" + run.cell.id + ".csv"),
                       plot_distance_csv(run));
        }

        write_file(out_dir / "summary.csv", summary_to_csv(runs));
        log << "wrote " << runs.size() << " scenarios x "
            << manifest.controllers.size() << " controllers under "
            << out_dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hybridacc
