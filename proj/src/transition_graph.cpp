#include "eamod/transition_graph.hpp"

#include <algorithm>
#include <limits>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"

namespace eamod {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ExtendedRequestSet::start_time(int i) const {
    if (i == 0) return -kInf;
    if (i == end_index()) return kInf;
    return request(i).start_time_h;
}

double ExtendedRequestSet::end_time(int i) const {
    if (i == 0) return -kInf;
    if (i == end_index()) return kInf;
    return request(i).end_time_h;
}

double TransitionBounds::max_station_power_kw() const {
    double p = 0.0;
    for (double v : station_power_kw_) p = std::max(p, v);
    return p;
}

std::size_t TransitionBounds::count_x() const {
    std::size_t n = 0;
    for (const auto& p : pairs_) n += p.x_ub ? 1 : 0;
    return n;
}

std::size_t TransitionBounds::count_s() const {
    std::size_t n = 0;
    for (const auto& p : pairs_)
        for (const auto& s : p.stations) n += s.s_ub ? 1 : 0;
    return n;
}

std::size_t TransitionBounds::count_c() const {
    std::size_t n = 0;
    for (const auto& p : pairs_)
        for (const auto& s : p.stations) n += s.c_ub_kwh > 0.0 ? 1 : 0;
    return n;
}

namespace {

void apply_heuristic(const ExtendedRequestSet& ext, TransitionBounds& b,
                     const HeuristicThresholds& th) {
    const int last = ext.end_index();
    for (int i = 1; i < last; ++i) {
        for (int j = 1; j < last; ++j) {
            if (i == j) continue;
            PairBound& p = b.at(i, j);
            if (!p.x_ub) continue;
            bool any_station = false;
            for (int c = 0; c < b.n_stations(); ++c) {
                StationBound& s = p.stations[c];
                if (!s.s_ub) continue;
                if (idle_time(i, j, c, b, th) > th.max_idle_h) {
                    s.s_ub = false;
                    s.c_ub_kwh = 0.0;
                } else {
                    any_station = true;
                }
            }
            // The pair survives if it works with some station or on its own.
            if (!any_station && idle_time(i, j, -1, b, th) > th.max_idle_h) p.x_ub = false;
        }
    }
}

} // namespace

TransitionDag build_dag(const std::vector<TravelRequest>& requests, const RoadNetwork& net,
                        const std::vector<ChargingStation>& stations, int depot_node,
                        double e_b_max_kwh, const std::optional<HeuristicThresholds>& thresholds) {
    if (e_b_max_kwh <= 0.0) throw ConfigError("e_b_max_kwh", "must be positive");
    for (std::size_t i = 1; i < requests.size(); ++i)
        if (requests[i - 1].start_time_h > requests[i].start_time_h)
            throw InvalidDimension("requests must be sorted by start time");

    TransitionDag dag;
    dag.extended.requests = requests;
    dag.extended.depot_node = depot_node;
    const ExtendedRequestSet& ext = dag.extended;
    const int n = ext.size();
    const int last = ext.end_index();

    std::vector<int> referenced{depot_node};
    for (const auto& r : requests) {
        referenced.push_back(r.origin);
        referenced.push_back(r.destination);
    }
    for (const auto& s : stations) referenced.push_back(s.node);
    const MetricTable metrics(net, referenced);

    dag.bounds = TransitionBounds(n, static_cast<int>(stations.size()));
    TransitionBounds& b = dag.bounds;
    for (std::size_t c = 0; c < stations.size(); ++c)
        b.set_station_power_kw(static_cast<int>(c), stations[c].power_kw);

    for (int i = 0; i < n; ++i) {
        if (i == last) continue; // nothing leaves the end depot
        for (int j = 1; j < n; ++j) {
            if (j == i) continue;
            PairBound& p = b.at(i, j);
            const PathMetrics leg = metrics.metric(ext.destination(i), ext.origin(j));
            p.t_fp_h = leg.time_h;
            p.d_fp_km = leg.distance_km;
            const bool depot_pair = ext.is_depot(i) || ext.is_depot(j);
            p.t_ava_h = depot_pair ? kInf : ext.start_time(j) - ext.end_time(i);
            p.x_ub = p.t_fp_h <= p.t_ava_h;
            if (!p.x_ub) continue;
            p.stations.resize(stations.size());
            for (std::size_t c = 0; c < stations.size(); ++c) {
                StationBound& s = p.stations[c];
                const DetourMetrics det =
                    metrics.detour(ext.destination(i), stations[c].node, ext.origin(j));
                s.detour_time_h = det.delta_time_h;
                s.detour_dist_km = det.delta_distance_km;
                const double spare = p.t_ava_h - p.t_fp_h - s.detour_time_h;
                if (spare >= 0.0) {
                    s.c_ub_kwh = std::min(spare * stations[c].power_kw, e_b_max_kwh);
                    s.s_ub = s.c_ub_kwh > 0.0;
                }
            }
        }
    }

    if (thresholds) apply_heuristic(ext, b, *thresholds);
    return dag;
}

double idle_time(int i, int j, int c, const TransitionBounds& bounds,
                 const HeuristicThresholds& th) {
    const PairBound& p = bounds.at(i, j);
    if (p.stations.empty() && c >= 0)
        throw DomainError("pair has no station data; it was never time-feasible");
    // an excessive deadhead leg or station detour disqualifies the transition
    // outright: +infinity always exceeds max_idle_h
    if (p.t_fp_h > th.max_deadhead_h) return kInf;
    double detour = 0.0;
    double power = bounds.max_station_power_kw();
    if (c >= 0) {
        const StationBound& s = p.stations[c];
        if (s.detour_time_h > th.max_detour_h) return kInf;
        detour = s.detour_time_h;
        power = bounds.station_power_kw(c);
    }
    const double charge_time = power > 0.0 ? th.daily_energy_kwh / power : 0.0;
    return p.t_ava_h - detour - p.t_fp_h - charge_time;
}

ReductionStats reduction_stats(const TransitionBounds& baseline, const TransitionBounds& pruned) {
    if (baseline.size() != pruned.size() || baseline.n_stations() != pruned.n_stations())
        throw MismatchedShapes("reduction_stats requires bounds over the same index sets");
    auto frac = [](std::size_t base, std::size_t kept) {
        return base == 0 ? 0.0 : static_cast<double>(base - kept) / static_cast<double>(base);
    };
    ReductionStats r;
    r.x_removed_frac = frac(baseline.count_x(), pruned.count_x());
    r.s_removed_frac = frac(baseline.count_s(), pruned.count_s());
    r.c_removed_frac = frac(baseline.count_c(), pruned.count_c());
    return r;
}

void write_dag_csv(const TransitionDag& dag, const std::string& path) {
    const TransitionBounds& b = dag.bounds;
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < b.size(); ++i) {
        for (int j = 0; j < b.size(); ++j) {
            if (i == j) continue;
            const PairBound& p = b.at(i, j);
            if (!p.x_ub && p.stations.empty()) continue;
            rows.push_back({std::to_string(i), std::to_string(j), "-1",
                            p.x_ub ? "1" : "0", "0", "0", format_double(p.t_fp_h),
                            format_double(p.t_ava_h), "0", "0"});
            for (int c = 0; c < static_cast<int>(p.stations.size()); ++c) {
                const StationBound& s = p.stations[c];
                rows.push_back({std::to_string(i), std::to_string(j), std::to_string(c),
                                p.x_ub ? "1" : "0", s.s_ub ? "1" : "0",
                                format_double(s.c_ub_kwh), format_double(p.t_fp_h),
                                format_double(p.t_ava_h), format_double(s.detour_time_h),
                                format_double(s.detour_dist_km)});
            }
        }
    }
    write_csv(path, {"i", "j", "c", "x_ub", "s_ub", "c_ub", "t_fp", "t_ava", "delta_t", "delta_d"},
              rows);
}

} // namespace eamod
