/**
 * @file main.cpp
 * @brief Command-line front end: parse a config, expand the scenario grid,
 *        run the matrix, and write traces/plots/summary.
 */

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hybridacc/config.hpp"
#include "hybridacc/runner.hpp"

namespace {

bool pick_controllers(const std::string& choice,
                      std::vector<hybridacc::ControllerKind>& out) {
    using hybridacc::ControllerKind;
    if (choice == "all") {
        out = {ControllerKind::kMpc, ControllerKind::kSafe,
               ControllerKind::kHybrid};
    } else if (choice == "mpc") {
        out = {ControllerKind::kMpc};
    } else if (choice == "safe") {
        out = {ControllerKind::kSafe};
    } else if (choice == "hybrid") {
        out = {ControllerKind::kHybrid};
    } else {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Longitudinal car-following lab: adaptive, safe and hybrid "
        "collision-avoidance controllers over a scenario matrix"};

    std::string config_path;
    std::string out_dir;
    std::string controller = "all";
    bool list_only = false;
    int workers = 1;

    app.add_option("--config", config_path, "Config file (INI-style)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--controller", controller,
                   "Controller set: mpc|safe|hybrid|all")
        ->default_str("all");
    app.add_flag("--list", list_only, "Print the scenario grid and exit");
    app.add_option("--workers", workers, "Worker threads for the matrix")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // bad flags are config errors
    }

    hybridacc::RunManifest manifest;
    try {
        manifest = config_path.empty() ? hybridacc::default_manifest()
                                       : hybridacc::parse_config(config_path);
        if (!pick_controllers(controller, manifest.controllers)) {
            std::cerr << "error: unknown controller '" << controller << "'\n";
            return 1;
        }
        if (!out_dir.empty()) manifest.out_dir = out_dir;
        if (const char* env = std::getenv("HYBRIDACC_OUT")) {
            manifest.out_dir = env;  // environment wins over --out
        }
        manifest.validate();
    } catch (const hybridacc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    if (list_only) {
        for (const hybridacc::ScenarioCell& cell :
             hybridacc::expand_grid(manifest)) {
            std::cout << cell.id;
            for (const hybridacc::ControllerKind kind : manifest.controllers) {
                std::cout << " " << hybridacc::controller_name(kind);
            }
            std::cout << "\n";
        }
        return 0;
    }

    return hybridacc::run_matrix(manifest, workers, std::cout);
}
