#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace eamod {

struct RoadNode {
    int id = 0;
    double x_km = 0.0;
    double y_km = 0.0;
};

struct RoadArc {
    int from = 0;
    int to = 0;
    double distance_km = 0.0;
    double time_h = 0.0;
};

struct ChargingStation {
    int id = 0;
    int node = 0;
    double power_kw = 0.0;
};

/// Travel time and the distance accumulated along the time-minimal path.
/// (0,0) iff origin == destination.
struct PathMetrics {
    double time_h = 0.0;
    double distance_km = 0.0;
};

struct DetourMetrics {
    double delta_time_h = 0.0;
    double delta_distance_km = 0.0;
};

/// Directed road graph. Immutable after construction; safe to share across
/// threads. Arc distances and times must be positive and endpoints must
/// reference existing nodes.
class RoadNetwork {
public:
    RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadArc> arcs);

    const std::vector<RoadNode>& nodes() const { return nodes_; }
    const std::vector<RoadArc>& arcs() const { return arcs_; }

    bool has_node(int id) const { return index_.count(id) != 0; }
    std::size_t node_index(int id) const; // throws UnknownNode
    const RoadNode& node(int id) const { return nodes_[node_index(id)]; }

    /// Minimum-travel-time path metrics. Equal-time paths are broken by
    /// smaller distance, then by node insertion order, so results are
    /// deterministic. Throws UnreachableNode if no path exists.
    PathMetrics fastest_path(int origin, int destination) const;

    /// Fastest-path metrics from one origin to every node, indexed by dense
    /// node index; unreachable entries have time_h < 0.
    std::vector<PathMetrics> fastest_paths_from(int origin) const;

private:
    std::vector<RoadNode> nodes_;
    std::vector<RoadArc> arcs_;
    std::unordered_map<int, std::size_t> index_;
    // adjacency in CSR form over dense node indices
    std::vector<std::size_t> adj_start_;
    std::vector<std::size_t> adj_arc_;
};

/// Extra time/distance incurred by routing from_node -> station -> to_node
/// instead of from_node -> to_node directly. Non-negative by the triangle
/// property of shortest paths.
DetourMetrics transition_detour(const RoadNetwork& net, const ChargingStation& station,
                                int from_node, int to_node);

/// Precomputed all-pairs fastest-path metrics over a set of referenced nodes
/// (request endpoints, station nodes, depot). Construction validates that the
/// referenced nodes are pairwise reachable and throws UnreachableNode
/// otherwise. Immutable and shareable.
class MetricTable {
public:
    MetricTable(const RoadNetwork& net, const std::vector<int>& node_ids);

    bool contains(int node_id) const { return pos_.count(node_id) != 0; }
    const PathMetrics& metric(int from_id, int to_id) const;
    DetourMetrics detour(int from_id, int via_id, int to_id) const;

private:
    std::unordered_map<int, std::size_t> pos_;
    std::size_t n_ = 0;
    std::vector<PathMetrics> table_; // row-major n_ x n_
};

/// Bidirectional rows x cols grid with block_km arc length and uniform speed;
/// stations are spread over the grid by farthest-point placement (first pick
/// seeded, ties to the lowest node id), all with charge power power_kw.
std::pair<RoadNetwork, std::vector<ChargingStation>>
generate_grid(int rows, int cols, double block_km, double speed_kmh, int n_stations,
              std::uint64_t seed, double power_kw = 6.0);

RoadNetwork load_network(const std::string& nodes_csv, const std::string& arcs_csv);
std::vector<ChargingStation> load_stations(const std::string& stations_csv, const RoadNetwork& net);

void write_network(const RoadNetwork& net, const std::string& nodes_csv, const std::string& arcs_csv);
void write_stations(const std::vector<ChargingStation>& stations, const std::string& stations_csv);

} // namespace eamod
