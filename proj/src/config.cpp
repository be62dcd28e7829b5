/**
 * @file config.cpp
 * @brief INI-style configuration parsing with line-numbered errors.
 */

#include "hybridacc/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace hybridacc {

namespace {

std::string trim(const std::string& s) {
    const size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(line, "empty numeric value");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ConfigError(line, "malformed number '" + t + "'");
    }
    return v;
}

int parse_int(const std::string& text, int line) {
    const double v = parse_number(text, line);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError(line, "expected an integer, got '" + trim(text) + "'");
    }
    return i;
}

bool parse_bool(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    throw ConfigError(line, "expected true or false, got '" + t + "'");
}

std::vector<double> parse_list(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
        throw ConfigError(line, "expected a bracketed list, got '" + t + "'");
    }
    std::vector<double> out;
    const std::string body = t.substr(1, t.size() - 2);
    if (trim(body).empty()) return out;
    size_t start = 0;
    while (start <= body.size()) {
        const size_t comma = body.find(',', start);
        const std::string item =
            body.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start);
        out.push_back(parse_number(item, line));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

void RunManifest::validate() const {
    if (amplitudes.empty() || periods.empty()) {
        throw ConfigError(0, "scenario grid is empty (A or T list empty)");
    }
    if (!include_nominal && brake_rates.empty()) {
        throw ConfigError(0, "no scenarios: nominal disabled and no brake rates");
    }
    if (controllers.empty()) {
        throw ConfigError(0, "no controllers selected");
    }
    try {
        ScenarioConfig probe = scenario;
        for (const double amplitude : amplitudes) {
            for (const double period : periods) {
                probe.amplitude = amplitude;
                probe.period = period;
                probe.validate();
            }
        }
        for (const double rate : brake_rates) {
            if (!(rate > 0.0)) {
                throw std::invalid_argument("brake rates must be > 0");
            }
        }
        if (t_brake < 0.0) {
            throw std::invalid_argument("t_brake must be >= 0");
        }
        mpc.validate();
        safe.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
}

RunManifest default_manifest() { return RunManifest{}; }

RunManifest parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file: " + path);

    RunManifest m = default_manifest();

    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = raw;
        const size_t comment = text.find_first_of("#;");
        if (comment != std::string::npos) text.erase(comment);
        text = trim(text);
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ConfigError(line, "unterminated section header");
            }
            section = trim(text.substr(1, text.size() - 2));
            if (section != "scenario" && section != "mpc" && section != "safe" &&
                section != "sim") {
                throw ConfigError(line, "unknown section [" + section + "]");
            }
            continue;
        }

        const size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "expected key = value");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = text.substr(eq + 1);
        if (key.empty()) throw ConfigError(line, "empty key");
        if (section.empty()) {
            throw ConfigError(line, "key '" + key + "' outside any section");
        }

        if (section == "scenario") {
            if (key == "A") m.amplitudes = parse_list(value, line);
            else if (key == "T") m.periods = parse_list(value, line);
            else if (key == "brake_rates") m.brake_rates = parse_list(value, line);
            else if (key == "nominal") m.include_nominal = parse_bool(value, line);
            else if (key == "v_a0") m.scenario.v_a0 = parse_number(value, line);
            else if (key == "d0") m.scenario.d0 = parse_number(value, line);
            else if (key == "ego_v0") m.scenario.ego_v0 = parse_number(value, line);
            else if (key == "t_brake") m.t_brake = parse_number(value, line);
            else if (key == "vehicle_length")
                m.scenario.vehicle_length = parse_number(value, line);
            else throw ConfigError(line, "unknown key '" + key + "' in [scenario]");
        } else if (section == "mpc") {
            if (key == "h") m.mpc.h = parse_int(value, line);
            else if (key == "q_p") m.mpc.q_p = parse_number(value, line);
            else if (key == "q_v") m.mpc.q_v = parse_number(value, line);
            else if (key == "q_a") m.mpc.q_a = parse_number(value, line);
            else if (key == "r") m.mpc.r = parse_number(value, line);
            else if (key == "d_c") m.mpc.d_c = parse_number(value, line);
            else if (key == "u_min") m.mpc.u_min = parse_number(value, line);
            else if (key == "u_max") m.mpc.u_max = parse_number(value, line);
            else if (key == "v_min") m.mpc.v_min = parse_number(value, line);
            else if (key == "v_max_limit")
                m.mpc.v_max_limit = parse_number(value, line);
            else if (key == "slack_weight")
                m.mpc.slack_weight = parse_number(value, line);
            else if (key == "accel_window")
                m.mpc.accel_window = parse_int(value, line);
            else if (key == "command_lookahead")
                m.mpc.command_lookahead = parse_number(value, line);
            else if (key == "prediction_dt")
                m.mpc.prediction_dt = parse_number(value, line);
            else throw ConfigError(line, "unknown key '" + key + "' in [mpc]");
        } else if (section == "safe") {
            if (key == "levels") m.safe.levels = parse_list(value, line);
            else if (key == "a_nom") m.safe.a_nom = parse_number(value, line);
            else if (key == "a_max") m.safe.a_max = parse_number(value, line);
            else if (key == "reaction_time")
                m.safe.reaction_time = parse_number(value, line);
            else throw ConfigError(line, "unknown key '" + key + "' in [safe]");
        } else {  // sim
            if (key == "dt") m.scenario.dt = parse_number(value, line);
            else if (key == "t_sim") m.scenario.t_sim = parse_number(value, line);
            else if (key == "tau") m.scenario.tau = parse_number(value, line);
            else throw ConfigError(line, "unknown key '" + key + "' in [sim]");
        }
    }

    m.validate();
    return m;
}

std::vector<ScenarioCell> expand_grid(const RunManifest& manifest) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%g", v);
        return std::string(buf);
    };

    std::vector<ScenarioCell> cells;
    auto add = [&](double amplitude, double period,
                   std::optional<BrakeEvent> brake, const std::string& suffix) {
        ScenarioCell cell;
        cell.scenario = manifest.scenario;
        cell.scenario.amplitude = amplitude;
        cell.scenario.period = period;
        cell.scenario.brake = brake;
        cell.id = "A" + num(amplitude) + "_T" + num(period) + "_" + suffix;
        cells.push_back(std::move(cell));
    };

    if (manifest.include_nominal) {
        for (const double amplitude : manifest.amplitudes) {
            for (const double period : manifest.periods) {
                add(amplitude, period, std::nullopt, "nominal");
            }
        }
    }
    for (const double rate : manifest.brake_rates) {
        for (const double amplitude : manifest.amplitudes) {
            for (const double period : manifest.periods) {
                add(amplitude, period, BrakeEvent{rate, manifest.t_brake},
                    "brake" + num(rate));
            }
        }
    }
    return cells;
}

}  // namespace hybridacc
