#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eamod/demand.hpp"
#include "eamod/economics.hpp"
#include "eamod/road_network.hpp"
#include "eamod/solver.hpp"
#include "eamod/transition_graph.hpp"

namespace eamod {

// Everything a worker needs to turn a request subset into a solved instance.
struct ScenarioContext {
    const RoadNetwork* network = nullptr;
    std::vector<ChargingStation> stations;
    int depot_node = 0;
    EconomicParams econ;
    int k_max = 1;
    bool homogeneous = true;
    std::optional<double> fixed_battery_kwh;  // pin every used vehicle's battery
    bool heuristic_enabled = true;
    HeuristicThresholds thresholds;
    SolveOptions solver;
    // Fleet scaling rule used by size_scan: k_max = max(1, round(size * this)).
    double vehicles_per_request = 0.125;
};

struct VehicleMetrics {
    int stops = 0;                        // charging stops over the day
    int requests_served = 0;
    double revenue_eur = 0.0;
    double avg_charge_per_stop_kwh = 0.0;
    double rebalancing_km = 0.0;          // customer-free driving incl. detours
    double battery_kwh = 0.0;
};

struct ScenarioResult {
    int id = 0;
    std::uint64_t seed = 0;
    int n_requests = 0;
    bool solved = false;                  // solved to proven optimality
    std::string error;                    // nonempty when the run failed
    FleetSolution solution;
    std::vector<VehicleMetrics> metrics;  // used vehicles only
    SolveReport report;
    std::vector<int> request_ids;         // by extended index minus one
    double wall_time_s = 0.0;
};

struct MetricStats {
    std::string name;
    double mean = 0.0;
    double std_dev = 0.0;                 // sample (n-1) standard deviation
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct AggregateStats {
    std::vector<MetricStats> rows;        // E_b, s, B_r, C_avg, r
};

struct SizeScanRow {
    int size = 0;
    double mean_norm_objective_per_request = 0.0;
    double mean_vehicles_per_request = 0.0;
    double rejection_rate = 0.0;
    double mean_wall_time_s = 0.0;
    int solved = 0;                       // scenarios solved to optimality
};

struct SensitivityRow {
    double e_b_kwh = 0.0;
    bool feasible = false;
    double objective_eur = 0.0;
    double fixed_cost_eur = 0.0;          // amortized vehicle + battery purchase
    double operational_cost_eur = 0.0;    // electricity
    double revenue_eur = 0.0;
    int fleet_size = 0;
    int served = 0;
    double total_charged_kwh = 0.0;
    double rebalancing_km = 0.0;
};

/// Per-used-vehicle operating statistics, recomputed purely from the solution.
std::vector<VehicleMetrics> compute_metrics(const FleetSolution& sol, const TransitionDag& dag);

/// Samples, prunes and solves m independent sub-problems (scenario seeds are
/// base_seed + index) and returns them ordered by scenario id. Failures are
/// captured per scenario, not thrown. jobs > 1 runs scenarios concurrently.
std::vector<ScenarioResult> run_scenarios(const std::vector<TravelRequest>& full_requests,
                                          int n_per, int m, std::uint64_t base_seed,
                                          const ScenarioContext& ctx, int jobs = 1);

/// Table of mean/std/min/max per vehicle metric over used vehicles of all
/// optimally solved scenarios. Throws EmptyResults when nothing contributes.
AggregateStats aggregate(const std::vector<ScenarioResult>& results);

/// Solves m scenarios per sub-problem size and reports per-request objective
/// (normalized by the largest size's mean magnitude), fleet usage and
/// rejection rate. Sizes must be ascending.
std::vector<SizeScanRow> size_scan(const std::vector<TravelRequest>& full_requests,
                                   const std::vector<int>& sizes, int m, std::uint64_t base_seed,
                                   const ScenarioContext& ctx, int jobs = 1);

/// Sweeps fixed battery capacities under a service quota and splits the
/// objective into purchase amortization, electricity and revenue. Grid points
/// where the quota cannot be met are flagged, not fatal.
std::vector<SensitivityRow> battery_sensitivity(const std::vector<TravelRequest>& full_requests,
                                                const std::vector<double>& e_b_grid,
                                                int served_quota, const ScenarioContext& ctx);

/// Probability that exactly k of n vehicles overlap within the time window:
/// binomial(n, k) p^k (1-p)^(n-k) with p = t_avg / t_w, evaluated in log
/// space so large n stays finite.
double overlap_probability(int n, int k, double t_avg_h, double t_w_h);

/// Monotone rank correlation of two equally long sequences; ties get average
/// ranks. Returns 0 for degenerate (constant) inputs.
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

void write_results_json(const std::string& path, const ScenarioResult& result);
void write_aggregate_csv(const std::string& path, const AggregateStats& stats);
void write_size_scan_csv(const std::string& path, const std::vector<SizeScanRow>& rows);
void write_sensitivity_csv(const std::string& path, const std::vector<SensitivityRow>& rows);
/// Rows (n, k, probability) for n = 1..n_max, k = 0..n.
void write_overlap_csv(const std::string& path, int n_max, double t_avg_h, double t_w_h);

}  // namespace eamod
