#include "eamod/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"
#include "eamod/milp_core.hpp"

namespace eamod {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Welford {
    std::vector<double> values;
    void add(double v) { values.push_back(v); }
    MetricStats stats(std::string name) const {
        MetricStats s;
        s.name = std::move(name);
        s.count = values.size();
        if (values.empty()) return s;
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        double ss = 0.0;
        for (const double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_dev = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
        s.min = *std::min_element(values.begin(), values.end());
        s.max = *std::max_element(values.begin(), values.end());
        return s;
    }
};

ScenarioResult solve_one(const std::vector<TravelRequest>& full, int n_per, int id,
                         std::uint64_t seed, const ScenarioContext& ctx) {
    ScenarioResult res;
    res.id = id;
    res.seed = seed;
    res.n_requests = n_per;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const std::vector<TravelRequest> sample = sample_subproblem(full, n_per, seed);
        for (const TravelRequest& r : sample) res.request_ids.push_back(r.id);
        const auto thresholds = ctx.heuristic_enabled
                                    ? std::optional<HeuristicThresholds>(ctx.thresholds)
                                    : std::nullopt;
        const TransitionDag dag = build_dag(sample, *ctx.network, ctx.stations, ctx.depot_node,
                                            ctx.econ.e_b_max_kwh, thresholds);
        ModelOptions mo;
        mo.homogeneous = ctx.homogeneous;
        mo.fixed_battery_kwh = ctx.fixed_battery_kwh;
        const MilpModel model = assemble_model(dag, ctx.k_max, ctx.econ, mo);
        auto [sol, report] = solve_fleet(model, dag, ctx.solver);
        res.solution = std::move(sol);
        res.report = report;
        res.solved = report.status == SolveStatus::Optimal;
        if (!res.solved) res.error = "not solved to optimality";
        if (res.solved) res.metrics = compute_metrics(res.solution, dag);
    } catch (const Error& e) {
        res.solved = false;
        res.error = e.what();
    }
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace

std::vector<VehicleMetrics> compute_metrics(const FleetSolution& sol, const TransitionDag& dag) {
    std::vector<VehicleMetrics> out;
    for (const VehiclePlan& plan : sol.vehicles) {
        if (!plan.used) continue;
        VehicleMetrics m;
        m.battery_kwh = plan.battery_kwh;
        m.stops = static_cast<int>(plan.charge_events.size());
        m.requests_served = static_cast<int>(plan.schedule.size()) - 2;
        for (std::size_t s = 0; s + 1 < plan.schedule.size(); ++s) {
            const int head = plan.schedule[s + 1];
            m.revenue_eur += dag.extended.price(head);
            m.rebalancing_km += dag.bounds.at(plan.schedule[s], head).d_fp_km;
        }
        double charged = 0.0;
        for (const ChargeEvent& ev : plan.charge_events) {
            charged += ev.energy_kwh;
            m.rebalancing_km +=
                dag.bounds.at(ev.after, ev.before).stations[static_cast<std::size_t>(ev.station)]
                    .detour_dist_km;
        }
        m.avg_charge_per_stop_kwh = m.stops > 0 ? charged / m.stops : 0.0;
        out.push_back(m);
    }
    return out;
}

std::vector<ScenarioResult> run_scenarios(const std::vector<TravelRequest>& full_requests,
                                          int n_per, int m, std::uint64_t base_seed,
                                          const ScenarioContext& ctx, int jobs) {
    if (m < 1) throw ConfigError("experiment.m", "needs at least one scenario");
    if (ctx.network == nullptr) throw ConfigError("paths.nodes", "no road network loaded");
    std::vector<ScenarioResult> results(static_cast<std::size_t>(m));
    const int workers = std::max(1, std::min(jobs, m));
    if (workers == 1) {
        for (int i = 0; i < m; ++i)
            results[static_cast<std::size_t>(i)] =
                solve_one(full_requests, n_per, i, base_seed + static_cast<std::uint64_t>(i), ctx);
        return results;
    }
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next.fetch_add(1); i < m; i = next.fetch_add(1))
            results[static_cast<std::size_t>(i)] =
                solve_one(full_requests, n_per, i, base_seed + static_cast<std::uint64_t>(i), ctx);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    return results;
}

AggregateStats aggregate(const std::vector<ScenarioResult>& results) {
    if (results.empty()) throw EmptyResults("aggregate: no scenarios");
    Welford e_b, stops, served, c_avg, revenue;
    for (const ScenarioResult& r : results) {
        if (!r.solved) continue;
        for (const VehicleMetrics& m : r.metrics) {
            e_b.add(m.battery_kwh);
            stops.add(m.stops);
            served.add(m.requests_served);
            c_avg.add(m.avg_charge_per_stop_kwh);
            revenue.add(m.revenue_eur);
        }
    }
    if (e_b.values.empty()) throw EmptyResults("aggregate: no used vehicles in solved scenarios");
    AggregateStats out;
    out.rows.push_back(e_b.stats("E_b"));
    out.rows.push_back(stops.stats("s"));
    out.rows.push_back(served.stats("B_r"));
    out.rows.push_back(c_avg.stats("C_avg"));
    out.rows.push_back(revenue.stats("r"));
    return out;
}

std::vector<SizeScanRow> size_scan(const std::vector<TravelRequest>& full_requests,
                                   const std::vector<int>& sizes, int m, std::uint64_t base_seed,
                                   const ScenarioContext& ctx, int jobs) {
    if (sizes.empty()) throw ConfigError("experiment.sizes", "empty size grid");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw ConfigError("experiment.sizes", "sizes must be ascending");

    std::vector<SizeScanRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const int size = sizes[si];
        ScenarioContext local = ctx;
        local.k_max = std::max(1, static_cast<int>(std::lround(size * ctx.vehicles_per_request)));
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(si) *
                                                   static_cast<std::uint64_t>(m);
        const std::vector<ScenarioResult> results =
            run_scenarios(full_requests, size, m, seed, local, jobs);

        SizeScanRow row;
        row.size = size;
        double obj = 0.0, veh = 0.0, rej = 0.0, wall = 0.0;
        for (const ScenarioResult& r : results) {
            wall += r.wall_time_s;
            if (!r.solved) continue;
            ++row.solved;
            obj += r.solution.objective_eur / size;
            int used = 0, served = 0;
            for (const VehiclePlan& p : r.solution.vehicles) used += p.used ? 1 : 0;
            for (const char s : r.solution.served) served += s ? 1 : 0;
            veh += static_cast<double>(used) / size;
            rej += 1.0 - static_cast<double>(served) / size;
        }
        row.mean_wall_time_s = wall / m;
        if (row.solved > 0) {
            row.mean_norm_objective_per_request = obj / row.solved;  // normalized below
            row.mean_vehicles_per_request = veh / row.solved;
            row.rejection_rate = rej / row.solved;
        } else {
            row.mean_norm_objective_per_request = kNan;
            row.mean_vehicles_per_request = kNan;
            row.rejection_rate = kNan;
        }
        rows.push_back(row);
    }

    // Objectives are negative (profit), so normalize by the magnitude of the
    // largest size's mean to keep the trend direction intact.
    const double base = rows.back().mean_norm_objective_per_request;
    const double denom = std::fabs(base) > 1e-12 ? std::fabs(base) : 1.0;
    for (SizeScanRow& row : rows) row.mean_norm_objective_per_request /= denom;
    return rows;
}

std::vector<SensitivityRow> battery_sensitivity(const std::vector<TravelRequest>& full_requests,
                                                const std::vector<double>& e_b_grid,
                                                int served_quota, const ScenarioContext& ctx) {
    if (e_b_grid.empty()) throw ConfigError("experiment.e_b_grid", "empty battery grid");
    if (!std::is_sorted(e_b_grid.begin(), e_b_grid.end()) || e_b_grid.front() <= 0.0)
        throw ConfigError("experiment.e_b_grid", "grid must be positive ascending");
    if (ctx.network == nullptr) throw ConfigError("paths.nodes", "no road network loaded");

    const auto thresholds = ctx.heuristic_enabled
                                ? std::optional<HeuristicThresholds>(ctx.thresholds)
                                : std::nullopt;
    const TransitionDag dag = build_dag(full_requests, *ctx.network, ctx.stations, ctx.depot_node,
                                        ctx.econ.e_b_max_kwh, thresholds);

    std::vector<SensitivityRow> rows;
    for (const double e_b : e_b_grid) {
        SensitivityRow row;
        row.e_b_kwh = e_b;
        EconomicParams econ = ctx.econ;
        econ.e_b0_kwh = std::min(econ.e_b0_kwh, e_b);  // boundary charge must fit
        ModelOptions mo;
        mo.homogeneous = ctx.homogeneous;
        mo.fixed_battery_kwh = e_b;
        mo.min_served = served_quota;
        const MilpModel model = assemble_model(dag, ctx.k_max, econ, mo);
        auto [sol, report] = solve_fleet(model, dag, ctx.solver);
        if (report.status != SolveStatus::Optimal && report.status != SolveStatus::Feasible) {
            row.feasible = false;
            row.objective_eur = kNan;
            row.fixed_cost_eur = kNan;
            row.operational_cost_eur = kNan;
            row.revenue_eur = kNan;
            rows.push_back(row);
            continue;
        }
        row.feasible = true;
        row.objective_eur = sol.objective_eur;
        const std::vector<VehicleMetrics> metrics = compute_metrics(sol, dag);
        for (const VehiclePlan& p : sol.vehicles) {
            if (!p.used) continue;
            ++row.fleet_size;
            row.fixed_cost_eur +=
                (econ.p_v_eur + econ.p_b_eur_per_kwh * p.battery_kwh) / econ.tau_v_days;
            for (const ChargeEvent& ev : p.charge_events) row.total_charged_kwh += ev.energy_kwh;
        }
        row.operational_cost_eur = econ.p_el_eur_per_kwh * row.total_charged_kwh;
        for (const VehicleMetrics& m : metrics) {
            row.revenue_eur += m.revenue_eur;
            row.rebalancing_km += m.rebalancing_km;
        }
        for (const char s : sol.served) row.served += s ? 1 : 0;
        rows.push_back(row);
    }
    return rows;
}

double overlap_probability(int n, int k, double t_avg_h, double t_w_h) {
    if (n < 0 || k < 0 || k > n) throw DomainError("overlap_probability: need 0 <= k <= n");
    if (!(t_avg_h > 0.0) || !(t_w_h > 0.0) || t_avg_h > t_w_h)
        throw DomainError("overlap_probability: need 0 < t_avg <= t_w");
    const double p = t_avg_h / t_w_h;
    double logp = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    if (k > 0) logp += k * std::log(p);
    if (n - k > 0) logp += (n - k) * std::log1p(-p);
    return std::exp(logp);
}

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw MismatchedShapes("spearman_rho: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&v](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n, 0.0);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double mean = (n + 1.0) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - mean) * (rb[i] - mean);
        da += (ra[i] - mean) * (ra[i] - mean);
        db += (rb[i] - mean) * (rb[i] - mean);
    }
    if (da <= 0.0 || db <= 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

void write_results_json(const std::string& path, const ScenarioResult& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["seed"] = r.seed;
    j["n_requests"] = r.n_requests;
    j["solved"] = r.solved;
    if (!r.error.empty()) j["error"] = r.error;
    j["wall_time_s"] = r.wall_time_s;
    j["request_ids"] = r.request_ids;
    const char* status = r.report.status == SolveStatus::Optimal     ? "optimal"
                         : r.report.status == SolveStatus::Feasible  ? "feasible"
                         : r.report.status == SolveStatus::TimeLimit ? "time_limit"
                                                                     : "infeasible";
    j["report"] = {{"status", status},
                   {"objective_eur", r.report.objective_eur},
                   {"bound_eur", r.report.bound_eur},
                   {"gap_eur", r.report.gap_eur},
                   {"nodes_explored", r.report.nodes_explored},
                   {"lp_iterations", r.report.lp_iterations},
                   {"wall_time_s", r.report.wall_time_s}};
    j["solution"] = {{"objective_eur", r.solution.objective_eur},
                     {"gap_eur", r.solution.gap}};
    j["solution"]["served"] = nlohmann::json::array();
    for (std::size_t i = 1; i + 1 < r.solution.served.size(); ++i)
        if (r.solution.served[i])
            j["solution"]["served"].push_back(
                i - 1 < r.request_ids.size() ? r.request_ids[i - 1] : static_cast<int>(i));
    j["solution"]["vehicles"] = nlohmann::json::array();
    for (const VehiclePlan& p : r.solution.vehicles) {
        nlohmann::json v;
        v["used"] = p.used;
        v["battery_kwh"] = p.battery_kwh;
        v["schedule"] = p.schedule;
        v["charge_events"] = nlohmann::json::array();
        for (const ChargeEvent& ev : p.charge_events)
            v["charge_events"].push_back({{"after", ev.after},
                                          {"before", ev.before},
                                          {"station", ev.station},
                                          {"energy_kwh", ev.energy_kwh}});
        nlohmann::json soc = nlohmann::json::array();
        for (const int node : p.schedule)
            soc.push_back(p.energy_at[static_cast<std::size_t>(node)]);
        v["soc_at_stops"] = soc;
        j["solution"]["vehicles"].push_back(std::move(v));
    }
    nlohmann::json ms = nlohmann::json::array();
    for (const VehicleMetrics& m : r.metrics)
        ms.push_back({{"stops", m.stops},
                      {"requests_served", m.requests_served},
                      {"revenue_eur", m.revenue_eur},
                      {"avg_charge_per_stop_kwh", m.avg_charge_per_stop_kwh},
                      {"rebalancing_km", m.rebalancing_km},
                      {"battery_kwh", m.battery_kwh}});
    j["metrics"] = std::move(ms);
    std::ofstream out(path);
    if (!out) throw IoError("write_results_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

void write_aggregate_csv(const std::string& path, const AggregateStats& stats) {
    CsvTable t;
    t.header = {"metric", "mean", "std_dev", "min", "max", "count"};
    for (const MetricStats& row : stats.rows)
        t.rows.push_back({row.name, format_double(row.mean), format_double(row.std_dev),
                          format_double(row.min), format_double(row.max),
                          std::to_string(row.count)});
    write_csv(path, t);
}

void write_size_scan_csv(const std::string& path, const std::vector<SizeScanRow>& rows) {
    CsvTable t;
    t.header = {"size", "mean_norm_objective_per_request", "mean_vehicles_per_request",
                "rejection_rate", "mean_wall_time_s", "solved"};
    for (const SizeScanRow& r : rows)
        t.rows.push_back({std::to_string(r.size), format_double(r.mean_norm_objective_per_request),
                          format_double(r.mean_vehicles_per_request), format_double(r.rejection_rate),
                          format_double(r.mean_wall_time_s), std::to_string(r.solved)});
    write_csv(path, t);
}

void write_sensitivity_csv(const std::string& path, const std::vector<SensitivityRow>& rows) {
    CsvTable t;
    t.header = {"e_b_kwh", "feasible", "objective_eur", "fixed_cost_eur", "operational_cost_eur",
                "revenue_eur", "fleet_size", "served", "total_charged_kwh", "rebalancing_km"};
    for (const SensitivityRow& r : rows)
        t.rows.push_back({format_double(r.e_b_kwh), r.feasible ? "1" : "0",
                          format_double(r.objective_eur), format_double(r.fixed_cost_eur),
                          format_double(r.operational_cost_eur), format_double(r.revenue_eur),
                          std::to_string(r.fleet_size), std::to_string(r.served),
                          format_double(r.total_charged_kwh), format_double(r.rebalancing_km)});
    write_csv(path, t);
}

void write_overlap_csv(const std::string& path, int n_max, double t_avg_h, double t_w_h) {
    if (n_max < 1) throw DomainError("write_overlap_csv: need n_max >= 1");
    CsvTable t;
    t.header = {"n", "k", "probability"};
    for (int n = 1; n <= n_max; ++n)
        for (int k = 0; k <= n; ++k)
            t.rows.push_back({std::to_string(n), std::to_string(k),
                              format_double(overlap_probability(n, k, t_avg_h, t_w_h))});
    write_csv(path, t);
}

}  // namespace eamod
