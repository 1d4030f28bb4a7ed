#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eamod/demand.hpp"
#include "eamod/road_network.hpp"

namespace eamod {

/// Requests 1..I plus two depot pseudo-requests: index 0 (every schedule's
/// first stop) and index I+1 (its last). Depot legs have zero service
/// time/distance and zero price.
struct ExtendedRequestSet {
    std::vector<TravelRequest> requests; // extended index i -> requests[i-1]
    int depot_node = 0;

    int n_requests() const { return static_cast<int>(requests.size()); }
    int size() const { return n_requests() + 2; }
    int end_index() const { return n_requests() + 1; }
    bool is_depot(int i) const { return i == 0 || i == end_index(); }

    const TravelRequest& request(int i) const { return requests[i - 1]; }
    int origin(int i) const { return is_depot(i) ? depot_node : request(i).origin; }
    int destination(int i) const { return is_depot(i) ? depot_node : request(i).destination; }
    double service_time(int i) const { return is_depot(i) ? 0.0 : request(i).service_time_h; }
    double service_distance(int i) const { return is_depot(i) ? 0.0 : request(i).service_distance_km; }
    double price(int i) const { return is_depot(i) ? 0.0 : request(i).price_eur; }
    double start_time(int i) const;
    double end_time(int i) const;
};

/// Per-station feasibility of a charge stop inside one transition. Detour
/// metrics stay populated after pruning so the pruning itself is auditable.
struct StationBound {
    bool s_ub = false;
    double c_ub_kwh = 0.0;
    double detour_time_h = 0.0;
    double detour_dist_km = 0.0;
};

/// Feasibility data for the ordered transition (i, j).
/// Invariants: x_ub implies t_fp_h <= t_ava_h; s_ub implies x_ub;
/// c_ub_kwh > 0 iff s_ub. Depot transitions carry t_ava_h = +infinity.
struct PairBound {
    bool x_ub = false;
    double t_fp_h = 0.0;
    double d_fp_km = 0.0;
    double t_ava_h = 0.0;
    std::vector<StationBound> stations; // populated iff x_ub held at build time
};

class TransitionBounds {
public:
    TransitionBounds() = default;
    TransitionBounds(int n_extended, int n_stations)
        : n_(n_extended), pairs_(static_cast<std::size_t>(n_extended) * n_extended),
          station_power_kw_(n_stations, 0.0) {}

    int size() const { return n_; }
    int n_stations() const { return static_cast<int>(station_power_kw_.size()); }
    PairBound& at(int i, int j) { return pairs_[static_cast<std::size_t>(i) * n_ + j]; }
    const PairBound& at(int i, int j) const { return pairs_[static_cast<std::size_t>(i) * n_ + j]; }

    double station_power_kw(int c) const { return station_power_kw_[c]; }
    void set_station_power_kw(int c, double p) { station_power_kw_[c] = p; }
    double max_station_power_kw() const;

    // nonzero upper-bound counts, the denominators of reduction_stats
    std::size_t count_x() const;
    std::size_t count_s() const;
    std::size_t count_c() const;

private:
    int n_ = 0;
    std::vector<PairBound> pairs_;
    std::vector<double> station_power_kw_;
};

/// Domain-reduction thresholds: a transition (i,j,c) is dropped when its idle
/// time exceeds max_idle_h, where excessive station detours (> max_detour_h)
/// or deadhead legs (> max_deadhead_h) make the idle time +infinity and hence
/// always drop it. daily_energy_kwh / charger power is the time budget a
/// vehicle may plausibly spend charging within one transition.
struct HeuristicThresholds {
    double max_idle_h = 0.1;
    double max_detour_h = 0.1;
    double max_deadhead_h = 0.1;
    double daily_energy_kwh = 30.0;
};

struct TransitionDag {
    ExtendedRequestSet extended;
    TransitionBounds bounds;
};

/// Computes all pairwise transition bounds. Requests must be sorted by start
/// time. With thresholds given, additionally applies the idle-time reduction;
/// depot transitions are never pruned. All-pairs metrics over the referenced
/// nodes are precomputed here, which validates their mutual reachability.
TransitionDag build_dag(const std::vector<TravelRequest>& requests, const RoadNetwork& net,
                        const std::vector<ChargingStation>& stations, int depot_node,
                        double e_b_max_kwh,
                        const std::optional<HeuristicThresholds>& thresholds = std::nullopt);

/// Idle time of transition (i,j) through station c, or the station-free idle
/// time when c == -1 (no detour term; charge-time budget uses the strongest
/// charger, or zero if there are no stations). Returns +infinity when the
/// detour or deadhead threshold is exceeded. Pair (i,j) must have been
/// populated at build time.
double idle_time(int i, int j, int c, const TransitionBounds& bounds,
                 const HeuristicThresholds& thresholds);

struct ReductionStats {
    double x_removed_frac = 0.0;
    double s_removed_frac = 0.0;
    double c_removed_frac = 0.0;
};

/// Fraction of nonzero upper bounds zeroed by pruning, relative to the
/// time-feasibility-only baseline. Throws MismatchedShapes on different
/// index sets.
ReductionStats reduction_stats(const TransitionBounds& baseline, const TransitionBounds& pruned);

/// Debug dump: one row per (i,j) pair (station column -1) plus one row per
/// (i,j,c) station option.
void write_dag_csv(const TransitionDag& dag, const std::string& path);

} // namespace eamod
