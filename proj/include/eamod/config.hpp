#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eamod/economics.hpp"
#include "eamod/solver.hpp"
#include "eamod/transition_graph.hpp"

namespace eamod {

// One JSON document drives every command; flags override single keys.
struct RunConfig {
    struct Paths {
        std::string nodes = "nodes.csv";
        std::string arcs = "arcs.csv";
        std::string stations = "stations.csv";
        std::string requests = "requests.csv";
        std::string out_dir = ".";
    } paths;

    EconomicParams economics;  // fleet block fills e_b_max_kwh / e_b0_kwh

    struct Fleet {
        int k_max = 4;
        bool homogeneous = true;
        std::optional<double> fixed_battery_kwh;  // unset: battery is a design variable
        int depot_node = 0;
    } fleet;

    struct Heuristic {
        bool enabled = true;
        HeuristicThresholds thresholds;
    } heuristic;

    SolveOptions solver;

    struct Experiment {
        int m = 10;
        int n_per = 10;
        std::vector<int> sizes = {8, 16, 32};
        std::vector<double> e_b_grid = {5.0, 10.0, 20.0, 40.0, 60.0};
        int quota = 5;
        std::uint64_t seed = 1;
        double vehicles_per_request = 0.125;
        int overlap_n = 30;
        double t_avg_h = 0.25;
        double t_w_h = 3.0;
        double lifetime_grid_step_kwh = 0.1;
        double daily_distance_km = 30.0 / 0.14;  // consumption-neutral default
    } experiment;

    struct Generate {
        int rows = 3;
        int cols = 3;
        double block_km = 1.0;
        double speed_kmh = 30.0;
        int n_stations = 2;
        double station_power_kw = 6.0;
        int n_requests = 20;
        double window_h = 12.0;
    } generate;
};

/// Parses a JSON config; unknown keys raise ConfigError naming the key path,
/// so typos fail loudly instead of silently using defaults.
RunConfig load_config(const std::string& path);

/// Applies a JSON document on top of an existing config (same strictness).
void apply_config_json(RunConfig& cfg, const std::string& json_text, const std::string& source);

/// Every recognized key with its default value, for --help.
std::string config_reference();

}  // namespace eamod
