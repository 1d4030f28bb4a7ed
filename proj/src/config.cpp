#include "eamod/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"

namespace eamod {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void known_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : keys) ok = ok || key == k;
        if (!ok) throw ConfigError(path + "." + key, "unknown key");
    }
}

void set_double(const json& b, const std::string& path, const char* key, double& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_number()) throw ConfigError(path + "." + key, "expected a number");
    out = b.at(key).get<double>();
}

void set_int(const json& b, const std::string& path, const char* key, int& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    out = b.at(key).get<int>();
}

void set_long(const json& b, const std::string& path, const char* key, long& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    out = b.at(key).get<long>();
}

void set_u64(const json& b, const std::string& path, const char* key, std::uint64_t& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    out = b.at(key).get<std::uint64_t>();
}

void set_bool(const json& b, const std::string& path, const char* key, bool& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_boolean()) throw ConfigError(path + "." + key, "expected true/false");
    out = b.at(key).get<bool>();
}

void set_string(const json& b, const std::string& path, const char* key, std::string& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_string()) throw ConfigError(path + "." + key, "expected a string");
    out = b.at(key).get<std::string>();
}

void set_int_vec(const json& b, const std::string& path, const char* key, std::vector<int>& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_array()) throw ConfigError(path + "." + key, "expected an array");
    out.clear();
    for (const json& v : b.at(key)) {
        if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected integers");
        out.push_back(v.get<int>());
    }
}

void set_double_vec(const json& b, const std::string& path, const char* key,
                    std::vector<double>& out) {
    if (!b.contains(key)) return;
    if (!b.at(key).is_array()) throw ConfigError(path + "." + key, "expected an array");
    out.clear();
    for (const json& v : b.at(key)) {
        if (!v.is_number()) throw ConfigError(path + "." + key, "expected numbers");
        out.push_back(v.get<double>());
    }
}

}  // namespace

void apply_config_json(RunConfig& cfg, const std::string& json_text, const std::string& source) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(source, std::string("invalid JSON: ") + e.what());
    }
    require_object(root, source);
    known_keys(root, source,
               {"paths", "economics", "fleet", "heuristic", "solver", "experiment", "generate"});

    if (root.contains("paths")) {
        const json& b = root["paths"];
        require_object(b, "paths");
        known_keys(b, "paths", {"nodes", "arcs", "stations", "requests", "out_dir"});
        set_string(b, "paths", "nodes", cfg.paths.nodes);
        set_string(b, "paths", "arcs", cfg.paths.arcs);
        set_string(b, "paths", "stations", cfg.paths.stations);
        set_string(b, "paths", "requests", cfg.paths.requests);
        set_string(b, "paths", "out_dir", cfg.paths.out_dir);
    }
    if (root.contains("economics")) {
        const json& b = root["economics"];
        require_object(b, "economics");
        known_keys(b, "economics",
                   {"p_v_eur", "p_b_eur_per_kwh", "p_el_eur_per_kwh", "tau_v_days",
                    "tau_cycle", "delta_e0_kwh_per_km", "delta_eb_per_km", "e_b_max_kwh",
                    "e_b0_kwh"});
        set_double(b, "economics", "p_v_eur", cfg.economics.p_v_eur);
        set_double(b, "economics", "p_b_eur_per_kwh", cfg.economics.p_b_eur_per_kwh);
        set_double(b, "economics", "p_el_eur_per_kwh", cfg.economics.p_el_eur_per_kwh);
        set_double(b, "economics", "tau_v_days", cfg.economics.tau_v_days);
        set_double(b, "economics", "tau_cycle", cfg.economics.tau_cycle);
        set_double(b, "economics", "delta_e0_kwh_per_km", cfg.economics.delta_e0_kwh_per_km);
        set_double(b, "economics", "delta_eb_per_km", cfg.economics.delta_eb_per_km);
        set_double(b, "economics", "e_b_max_kwh", cfg.economics.e_b_max_kwh);
        set_double(b, "economics", "e_b0_kwh", cfg.economics.e_b0_kwh);
    }
    if (root.contains("fleet")) {
        const json& b = root["fleet"];
        require_object(b, "fleet");
        known_keys(b, "fleet",
                   {"k_max", "homogeneous", "fixed_battery_kwh", "depot_node", "e_b_max", "e_b0"});
        set_int(b, "fleet", "k_max", cfg.fleet.k_max);
        set_bool(b, "fleet", "homogeneous", cfg.fleet.homogeneous);
        if (b.contains("fixed_battery_kwh")) {
            double v = 0.0;
            set_double(b, "fleet", "fixed_battery_kwh", v);
            cfg.fleet.fixed_battery_kwh = v;
        }
        set_int(b, "fleet", "depot_node", cfg.fleet.depot_node);
        set_double(b, "fleet", "e_b_max", cfg.economics.e_b_max_kwh);
        set_double(b, "fleet", "e_b0", cfg.economics.e_b0_kwh);
    }
    if (root.contains("heuristic")) {
        const json& b = root["heuristic"];
        require_object(b, "heuristic");
        known_keys(b, "heuristic",
                   {"enabled", "max_idle_h", "max_detour_h", "max_deadhead_h", "daily_energy_kwh"});
        set_bool(b, "heuristic", "enabled", cfg.heuristic.enabled);
        set_double(b, "heuristic", "max_idle_h", cfg.heuristic.thresholds.max_idle_h);
        set_double(b, "heuristic", "max_detour_h", cfg.heuristic.thresholds.max_detour_h);
        set_double(b, "heuristic", "max_deadhead_h", cfg.heuristic.thresholds.max_deadhead_h);
        set_double(b, "heuristic", "daily_energy_kwh", cfg.heuristic.thresholds.daily_energy_kwh);
    }
    if (root.contains("solver")) {
        const json& b = root["solver"];
        require_object(b, "solver");
        known_keys(b, "solver", {"time_limit_s", "abs_gap", "rel_gap", "node_limit"});
        set_double(b, "solver", "time_limit_s", cfg.solver.time_limit_s);
        set_double(b, "solver", "abs_gap", cfg.solver.abs_gap);
        set_double(b, "solver", "rel_gap", cfg.solver.rel_gap);
        set_long(b, "solver", "node_limit", cfg.solver.node_limit);
    }
    if (root.contains("experiment")) {
        const json& b = root["experiment"];
        require_object(b, "experiment");
        known_keys(b, "experiment",
                   {"m", "n_per", "sizes", "e_b_grid", "quota", "seed", "vehicles_per_request",
                    "overlap_n", "t_avg_h", "t_w_h", "lifetime_grid_step_kwh",
                    "daily_distance_km"});
        set_int(b, "experiment", "m", cfg.experiment.m);
        set_int(b, "experiment", "n_per", cfg.experiment.n_per);
        set_int_vec(b, "experiment", "sizes", cfg.experiment.sizes);
        set_double_vec(b, "experiment", "e_b_grid", cfg.experiment.e_b_grid);
        set_int(b, "experiment", "quota", cfg.experiment.quota);
        set_u64(b, "experiment", "seed", cfg.experiment.seed);
        set_double(b, "experiment", "vehicles_per_request", cfg.experiment.vehicles_per_request);
        set_int(b, "experiment", "overlap_n", cfg.experiment.overlap_n);
        set_double(b, "experiment", "t_avg_h", cfg.experiment.t_avg_h);
        set_double(b, "experiment", "t_w_h", cfg.experiment.t_w_h);
        set_double(b, "experiment", "lifetime_grid_step_kwh",
                   cfg.experiment.lifetime_grid_step_kwh);
        set_double(b, "experiment", "daily_distance_km", cfg.experiment.daily_distance_km);
    }
    if (root.contains("generate")) {
        const json& b = root["generate"];
        require_object(b, "generate");
        known_keys(b, "generate",
                   {"rows", "cols", "block_km", "speed_kmh", "n_stations", "station_power_kw",
                    "n_requests", "window_h"});
        set_int(b, "generate", "rows", cfg.generate.rows);
        set_int(b, "generate", "cols", cfg.generate.cols);
        set_double(b, "generate", "block_km", cfg.generate.block_km);
        set_double(b, "generate", "speed_kmh", cfg.generate.speed_kmh);
        set_int(b, "generate", "n_stations", cfg.generate.n_stations);
        set_double(b, "generate", "station_power_kw", cfg.generate.station_power_kw);
        set_int(b, "generate", "n_requests", cfg.generate.n_requests);
        set_double(b, "generate", "window_h", cfg.generate.window_h);
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg;
    apply_config_json(cfg, buf.str(), path);
    return cfg;
}

std::string config_reference() {
    const RunConfig d;
    std::ostringstream out;
    auto line = [&out](const char* key, const std::string& value, const char* what) {
        out << "  " << key;
        for (std::size_t i = std::string(key).size(); i < 36; ++i) out << ' ';
        out << "default " << value << "  - " << what << "\n";
    };
    out << "Config keys (JSON document, block.key):\n";
    line("paths.nodes", d.paths.nodes, "road nodes CSV");
    line("paths.arcs", d.paths.arcs, "road arcs CSV");
    line("paths.stations", d.paths.stations, "charging stations CSV");
    line("paths.requests", d.paths.requests, "travel requests CSV");
    line("paths.out_dir", d.paths.out_dir, "output directory");
    line("economics.p_v_eur", format_double(d.economics.p_v_eur), "vehicle purchase price");
    line("economics.p_b_eur_per_kwh", format_double(d.economics.p_b_eur_per_kwh),
         "battery pack price per kWh");
    line("economics.p_el_eur_per_kwh", format_double(d.economics.p_el_eur_per_kwh),
         "electricity price per kWh");
    line("economics.tau_v_days", format_double(d.economics.tau_v_days),
         "vehicle amortization horizon, days");
    line("economics.tau_cycle", format_double(d.economics.tau_cycle),
         "battery cycle life, full cycles");
    line("economics.delta_e0_kwh_per_km", format_double(d.economics.delta_e0_kwh_per_km),
         "base consumption per km");
    line("economics.delta_eb_per_km", format_double(d.economics.delta_eb_per_km),
         "consumption per km per battery kWh");
    line("economics.e_b_max_kwh", format_double(d.economics.e_b_max_kwh),
         "largest installable battery");
    line("economics.e_b0_kwh", format_double(d.economics.e_b0_kwh),
         "start/end-of-day charge level");
    line("fleet.k_max", std::to_string(d.fleet.k_max), "vehicle slots in the model");
    line("fleet.homogeneous", d.fleet.homogeneous ? "true" : "false",
         "force equal batteries across used vehicles");
    line("fleet.fixed_battery_kwh", "unset",
         "pin every used vehicle's battery instead of optimizing it");
    line("fleet.depot_node", std::to_string(d.fleet.depot_node), "depot road node id");
    line("fleet.e_b_max", format_double(d.economics.e_b_max_kwh),
         "alias of economics.e_b_max_kwh (wins if both set)");
    line("fleet.e_b0", format_double(d.economics.e_b0_kwh),
         "alias of economics.e_b0_kwh (wins if both set)");
    line("heuristic.enabled", d.heuristic.enabled ? "true" : "false",
         "prune unpromising transitions");
    line("heuristic.max_idle_h", format_double(d.heuristic.thresholds.max_idle_h),
         "idle-time cutoff");
    line("heuristic.max_detour_h", format_double(d.heuristic.thresholds.max_detour_h),
         "station detour cutoff");
    line("heuristic.max_deadhead_h", format_double(d.heuristic.thresholds.max_deadhead_h),
         "empty-drive cutoff");
    line("heuristic.daily_energy_kwh", format_double(d.heuristic.thresholds.daily_energy_kwh),
         "charge-budget allowance in the idle test");
    line("solver.time_limit_s", format_double(d.solver.time_limit_s), "wall-clock budget");
    line("solver.abs_gap", format_double(d.solver.abs_gap), "absolute optimality gap");
    line("solver.rel_gap", format_double(d.solver.rel_gap), "relative optimality gap");
    line("solver.node_limit", std::to_string(d.solver.node_limit), "search node budget");
    line("experiment.m", std::to_string(d.experiment.m), "scenarios per experiment");
    line("experiment.n_per", std::to_string(d.experiment.n_per), "requests sampled per scenario");
    line("experiment.sizes", "[8,16,32]", "sub-problem sizes for the size scan");
    line("experiment.e_b_grid", "[5,10,20,40,60]", "battery grid for the sensitivity scan");
    line("experiment.quota", std::to_string(d.experiment.quota),
         "served-requests floor in the sensitivity scan");
    line("experiment.seed", std::to_string(d.experiment.seed), "base seed for all randomness");
    line("experiment.vehicles_per_request", format_double(d.experiment.vehicles_per_request),
         "fleet scaling rule in the size scan");
    line("experiment.overlap_n", std::to_string(d.experiment.overlap_n),
         "largest fleet size in the overlap table");
    line("experiment.t_avg_h", format_double(d.experiment.t_avg_h),
         "average overlap duration, hours");
    line("experiment.t_w_h", format_double(d.experiment.t_w_h), "observation window, hours");
    line("experiment.lifetime_grid_step_kwh",
         format_double(d.experiment.lifetime_grid_step_kwh), "cost-curve grid step");
    line("experiment.daily_distance_km", format_double(d.experiment.daily_distance_km),
         "daily driven distance for the cost curve");
    line("generate.rows", std::to_string(d.generate.rows), "grid rows");
    line("generate.cols", std::to_string(d.generate.cols), "grid columns");
    line("generate.block_km", format_double(d.generate.block_km), "block edge length, km");
    line("generate.speed_kmh", format_double(d.generate.speed_kmh), "driving speed, km/h");
    line("generate.n_stations", std::to_string(d.generate.n_stations), "charging stations");
    line("generate.station_power_kw", format_double(d.generate.station_power_kw),
         "charging power per station");
    line("generate.n_requests", std::to_string(d.generate.n_requests), "synthetic requests");
    line("generate.window_h", format_double(d.generate.window_h), "request start-time window");
    return out.str();
}

}  // namespace eamod
