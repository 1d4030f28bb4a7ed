// Command-line driver: generate | solve | experiment <kind>, all driven by a
// JSON config with flag overrides (flag > config > default).
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 solver error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eamod/analysis.hpp"
#include "eamod/config.hpp"
#include "eamod/demand.hpp"
#include "eamod/economics.hpp"
#include "eamod/errors.hpp"
#include "eamod/milp_core.hpp"
#include "eamod/mps.hpp"
#include "eamod/road_network.hpp"
#include "eamod/solver.hpp"
#include "eamod/transition_graph.hpp"

namespace {

namespace fs = std::filesystem;
using namespace eamod;

// Output files land in out_dir; absolute names bypass it.
std::string in_out_dir(const RunConfig& cfg, const std::string& name) {
    fs::path p = fs::path(cfg.paths.out_dir) / name;
    return p.string();
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.paths.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.paths.out_dir + "': " + ec.message());
}

struct LoadedInstance {
    RoadNetwork network;
    std::vector<ChargingStation> stations;
    std::vector<TravelRequest> requests;
};

LoadedInstance load_instance(const RunConfig& cfg) {
    RoadNetwork net = load_network(cfg.paths.nodes, cfg.paths.arcs);
    std::vector<ChargingStation> stations = load_stations(cfg.paths.stations, net);
    std::vector<TravelRequest> requests = load_requests(cfg.paths.requests, net, Tariff{});
    return {std::move(net), std::move(stations), std::move(requests)};
}

ScenarioContext make_context(const RunConfig& cfg, const LoadedInstance& inst) {
    ScenarioContext ctx;
    ctx.network = &inst.network;
    ctx.stations = inst.stations;
    ctx.depot_node = cfg.fleet.depot_node;
    ctx.econ = cfg.economics;
    ctx.k_max = cfg.fleet.k_max;
    ctx.homogeneous = cfg.fleet.homogeneous;
    ctx.fixed_battery_kwh = cfg.fleet.fixed_battery_kwh;
    ctx.heuristic_enabled = cfg.heuristic.enabled;
    ctx.thresholds = cfg.heuristic.thresholds;
    ctx.solver = cfg.solver;
    ctx.vehicles_per_request = cfg.experiment.vehicles_per_request;
    return ctx;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::TimeLimit: return "time limit";
    }
    return "?";
}

int cmd_generate(const RunConfig& cfg) {
    const auto& g = cfg.generate;
    // Purpose offsets keep network layout and demand independently seeded.
    const std::uint64_t grid_seed = cfg.experiment.seed;
    const std::uint64_t demand_seed = cfg.experiment.seed + 1;

    auto [net, stations] = generate_grid(g.rows, g.cols, g.block_km, g.speed_kmh, g.n_stations,
                                         grid_seed, g.station_power_kw);
    std::vector<TravelRequest> requests =
        synth_requests(g.n_requests, g.window_h, net, Tariff{}, demand_seed);

    ensure_out_dir(cfg);
    const std::string nodes = in_out_dir(cfg, cfg.paths.nodes);
    const std::string arcs = in_out_dir(cfg, cfg.paths.arcs);
    const std::string stations_path = in_out_dir(cfg, cfg.paths.stations);
    const std::string requests_path = in_out_dir(cfg, cfg.paths.requests);
    write_network(net, nodes, arcs);
    write_stations(stations, stations_path);
    write_requests(requests, requests_path);

    std::cout << "generated " << g.rows << "x" << g.cols << " grid (" << net.nodes().size()
              << " nodes, " << net.arcs().size() << " arcs), " << stations.size() << " stations, "
              << requests.size() << " requests over " << g.window_h << " h\n"
              << "wrote " << nodes << ", " << arcs << ", " << stations_path << ", "
              << requests_path << "\n";
    return 0;
}

int cmd_solve(const RunConfig& cfg, bool export_mps) {
    LoadedInstance inst = load_instance(cfg);
    const auto thresholds = cfg.heuristic.enabled
                                ? std::optional<HeuristicThresholds>(cfg.heuristic.thresholds)
                                : std::nullopt;
    const TransitionDag dag = build_dag(inst.requests, inst.network, inst.stations,
                                        cfg.fleet.depot_node, cfg.economics.e_b_max_kwh,
                                        thresholds);
    ModelOptions mo;
    mo.homogeneous = cfg.fleet.homogeneous;
    mo.fixed_battery_kwh = cfg.fleet.fixed_battery_kwh;
    const MilpModel model = assemble_model(dag, cfg.fleet.k_max, cfg.economics, mo);

    ensure_out_dir(cfg);
    if (export_mps) {
        const std::string mps_path = in_out_dir(cfg, "model.mps");
        write_mps(model, mps_path);
        std::cout << "wrote " << mps_path << " (+ " << mps_path << ".names.json)\n";
    }

    auto [sol, report] = solve_fleet(model, dag, cfg.solver);

    ScenarioResult res;
    res.id = 0;
    res.seed = cfg.experiment.seed;
    res.n_requests = static_cast<int>(inst.requests.size());
    res.solved = sol.status == SolveStatus::Optimal;
    res.solution = sol;
    res.metrics = compute_metrics(sol, dag);
    res.report = report;
    for (const TravelRequest& r : inst.requests) res.request_ids.push_back(r.id);
    res.wall_time_s = report.wall_time_s;
    const std::string results_path = in_out_dir(cfg, "results.json");
    write_results_json(results_path, res);

    int used = 0, served = 0;
    for (const VehiclePlan& v : sol.vehicles) used += v.used ? 1 : 0;
    for (char s : sol.served) served += s ? 1 : 0;
    std::cout << "status        " << status_name(sol.status) << "\n"
              << "objective     " << sol.objective_eur << " EUR/day\n"
              << "bound         " << report.bound_eur << " EUR/day (gap " << report.gap_eur
              << ")\n"
              << "vehicles      " << used << " of " << cfg.fleet.k_max << " used\n"
              << "served        " << served << " of " << inst.requests.size() << " requests\n"
              << "nodes         " << report.nodes_explored << "\n"
              << "lp iterations " << report.lp_iterations << "\n"
              << "wall time     " << report.wall_time_s << " s\n";
    for (std::size_t k = 0; k < sol.vehicles.size(); ++k) {
        const VehiclePlan& v = sol.vehicles[k];
        if (!v.used) continue;
        std::cout << "vehicle " << k << ": battery " << v.battery_kwh << " kWh, "
                  << v.schedule.size() - 2 << " requests, " << v.charge_events.size()
                  << " charge stops\n";
    }
    std::cout << "wrote " << results_path << "\n";
    return sol.status == SolveStatus::Infeasible ? 3 : 0;
}

int cmd_experiment_sample(const RunConfig& cfg, int jobs) {
    LoadedInstance inst = load_instance(cfg);
    const ScenarioContext ctx = make_context(cfg, inst);
    const auto& e = cfg.experiment;
    std::vector<ScenarioResult> results =
        run_scenarios(inst.requests, e.n_per, e.m, e.seed, ctx, jobs);

    ensure_out_dir(cfg);
    for (const ScenarioResult& r : results) {
        write_results_json(in_out_dir(cfg, "results_" + std::to_string(r.id) + ".json"), r);
        std::cout << "scenario " << r.id << " (seed " << r.seed << "): ";
        if (!r.error.empty())
            std::cout << "failed: " << r.error << "\n";
        else
            std::cout << status_name(r.solution.status) << ", objective "
                      << r.solution.objective_eur << " EUR/day, " << r.wall_time_s << " s\n";
    }
    const AggregateStats stats = aggregate(results);
    const std::string agg_path = in_out_dir(cfg, "aggregate.csv");
    write_aggregate_csv(agg_path, stats);
    std::cout << "metric  mean  std  min  max  n\n";
    for (const MetricStats& m : stats.rows)
        std::cout << m.name << "  " << m.mean << "  " << m.std_dev << "  " << m.min << "  "
                  << m.max << "  " << m.count << "\n";
    std::cout << "wrote " << agg_path << " and " << results.size() << " results_<i>.json files\n";
    return 0;
}

int cmd_experiment_size_scan(const RunConfig& cfg, int jobs) {
    LoadedInstance inst = load_instance(cfg);
    const ScenarioContext ctx = make_context(cfg, inst);
    const auto& e = cfg.experiment;
    std::vector<SizeScanRow> rows = size_scan(inst.requests, e.sizes, e.m, e.seed, ctx, jobs);
    ensure_out_dir(cfg);
    const std::string path = in_out_dir(cfg, "size_scan.csv");
    write_size_scan_csv(path, rows);
    std::cout << "size  norm_obj/request  vehicles/request  rejection  wall_s  solved\n";
    for (const SizeScanRow& r : rows)
        std::cout << r.size << "  " << r.mean_norm_objective_per_request << "  "
                  << r.mean_vehicles_per_request << "  " << r.rejection_rate << "  "
                  << r.mean_wall_time_s << "  " << r.solved << "/" << e.m << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_experiment_sensitivity(const RunConfig& cfg) {
    LoadedInstance inst = load_instance(cfg);
    const ScenarioContext ctx = make_context(cfg, inst);
    const auto& e = cfg.experiment;
    std::vector<SensitivityRow> rows =
        battery_sensitivity(inst.requests, e.e_b_grid, e.quota, ctx);
    ensure_out_dir(cfg);
    const std::string path = in_out_dir(cfg, "sensitivity.csv");
    write_sensitivity_csv(path, rows);
    std::cout << "E_b_kWh  objective  fixed  electricity  revenue  fleet  served\n";
    for (const SensitivityRow& r : rows) {
        std::cout << r.e_b_kwh << "  ";
        if (!r.feasible) {
            std::cout << "quota infeasible\n";
            continue;
        }
        std::cout << r.objective_eur << "  " << r.fixed_cost_eur << "  "
                  << r.operational_cost_eur << "  " << r.revenue_eur << "  " << r.fleet_size
                  << "  " << r.served << "\n";
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_experiment_lifetime(const RunConfig& cfg) {
    const auto& e = cfg.experiment;
    LifetimeModel model;
    model.tau_cycle = cfg.economics.tau_cycle;
    model.econ = cfg.economics;

    const double step = e.lifetime_grid_step_kwh;
    if (step <= 0.0) throw ConfigError("experiment.lifetime_grid_step_kwh", "must be positive");
    std::vector<double> grid;
    for (double v = step; v <= cfg.economics.e_b_max_kwh + 1e-9; v += step) grid.push_back(v);
    if (grid.empty()) throw ConfigError("experiment.lifetime_grid_step_kwh",
                                        "step exceeds fleet.e_b_max");

    ensure_out_dir(cfg);
    const std::string path = in_out_dir(cfg, "cost_curve.csv");
    write_cost_curve(path, model, grid, e.daily_distance_km);

    double best = grid.front();
    for (double v : grid)
        if (amortized_cost_per_km(v, model) < amortized_cost_per_km(best, model)) best = v;
    std::cout << "closed-form optimal battery  " << optimal_battery_unit_cost(model) << " kWh\n"
              << "grid argmin (" << step << " kWh steps)  " << best << " kWh\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_experiment_overlap(const RunConfig& cfg) {
    const auto& e = cfg.experiment;
    ensure_out_dir(cfg);
    const std::string path = in_out_dir(cfg, "overlap.csv");
    write_overlap_csv(path, e.overlap_n, e.t_avg_h, e.t_w_h);
    std::cout << "P(k=1 | n=1) = " << overlap_probability(1, 1, e.t_avg_h, e.t_w_h) << "\n"
              << "wrote " << path << " (n = 1.." << e.overlap_n << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electric fleet design: joint optimization of fleet size, battery capacity,\n"
                 "request assignment and charge scheduling over a request-transition DAG."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool export_mps = false;

    app.add_option("--config", config_path, "JSON config file (see key list below)");
    app.add_option("--jobs", jobs, "concurrent scenario workers")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "overrides experiment.seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    app.add_flag("--export-mps", export_mps, "solve: also write model.mps");
    app.add_option("--out", out_dir, "output directory (overrides paths.out_dir)");

    CLI::App* c_generate = app.add_subcommand("generate", "write a synthetic grid instance");
    CLI::App* c_solve = app.add_subcommand("solve", "solve one instance end to end");
    CLI::App* c_experiment = app.add_subcommand("experiment", "run an analysis experiment");
    for (CLI::App* sub : {c_generate, c_solve, c_experiment}) sub->fallthrough();
    std::string kind;
    c_experiment->add_option("kind", kind, "sample | size-scan | sensitivity | lifetime | overlap")
        ->required()
        ->check(CLI::IsMember({"sample", "size-scan", "sensitivity", "lifetime", "overlap"}));

    app.footer("Config keys (flag > config > default):\n" + eamod::config_reference());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // usage errors collapse onto one exit code
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (seed_set) cfg.experiment.seed = seed;
        if (!out_dir.empty()) cfg.paths.out_dir = out_dir;

        if (c_generate->parsed()) return cmd_generate(cfg);
        if (c_solve->parsed()) return cmd_solve(cfg, export_mps);
        if (c_experiment->parsed()) {
            if (kind == "sample") return cmd_experiment_sample(cfg, jobs);
            if (kind == "size-scan") return cmd_experiment_size_scan(cfg, jobs);
            if (kind == "sensitivity") return cmd_experiment_sensitivity(cfg);
            if (kind == "lifetime") return cmd_experiment_lifetime(cfg);
            return cmd_experiment_overlap(cfg);
        }
        return 1;
    } catch (const NumericalFailure& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const InfeasibleModel& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
