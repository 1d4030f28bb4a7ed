#include "eamod/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"
#include "eamod/rng.hpp"

namespace eamod {

RoadNetwork::RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadArc> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].id, i).second)
            throw InvalidDimension("duplicate node id " + std::to_string(nodes_[i].id));
    }
    for (const auto& a : arcs_) {
        if (a.distance_km <= 0.0 || a.time_h <= 0.0)
            throw InvalidDimension("arc " + std::to_string(a.from) + "->" + std::to_string(a.to) +
                                   " must have positive distance and time");
        if (!has_node(a.from)) throw UnknownNode(a.from);
        if (!has_node(a.to)) throw UnknownNode(a.to);
    }
    // CSR adjacency; within a node, arcs sorted by destination index for
    // deterministic traversal.
    adj_start_.assign(nodes_.size() + 1, 0);
    for (const auto& a : arcs_) ++adj_start_[index_.at(a.from) + 1];
    for (std::size_t i = 1; i < adj_start_.size(); ++i) adj_start_[i] += adj_start_[i - 1];
    adj_arc_.resize(arcs_.size());
    std::vector<std::size_t> fill(adj_start_.begin(), adj_start_.end() - 1);
    for (std::size_t ai = 0; ai < arcs_.size(); ++ai)
        adj_arc_[fill[index_.at(arcs_[ai].from)]++] = ai;
    for (std::size_t u = 0; u < nodes_.size(); ++u)
        std::sort(adj_arc_.begin() + adj_start_[u], adj_arc_.begin() + adj_start_[u + 1],
                  [this](std::size_t a, std::size_t b) {
                      std::size_t ta = index_.at(arcs_[a].to), tb = index_.at(arcs_[b].to);
                      return std::tie(ta, a) < std::tie(tb, b);
                  });
}

std::size_t RoadNetwork::node_index(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownNode(id);
    return it->second;
}

std::vector<PathMetrics> RoadNetwork::fastest_paths_from(int origin) const {
    const std::size_t src = node_index(origin);
    const std::size_t n = nodes_.size();
    std::vector<PathMetrics> best(n, PathMetrics{-1.0, 0.0});
    // label = (time, distance, node index); lexicographic order makes the
    // distance tie-break and determinism fall out of the queue ordering
    using Label = std::tuple<double, double, std::size_t>;
    std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
    std::vector<char> done(n, 0);
    best[src] = {0.0, 0.0};
    pq.emplace(0.0, 0.0, src);
    while (!pq.empty()) {
        auto [t, d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (std::size_t k = adj_start_[u]; k < adj_start_[u + 1]; ++k) {
            const RoadArc& a = arcs_[adj_arc_[k]];
            const std::size_t v = index_.at(a.to);
            if (done[v]) continue;
            const double nt = t + a.time_h;
            const double nd = d + a.distance_km;
            if (best[v].time_h < 0.0 || nt < best[v].time_h ||
                (nt == best[v].time_h && nd < best[v].distance_km)) {
                best[v] = {nt, nd};
                pq.emplace(nt, nd, v);
            }
        }
    }
    return best;
}

PathMetrics RoadNetwork::fastest_path(int origin, int destination) const {
    const std::size_t dst = node_index(destination);
    auto best = fastest_paths_from(origin);
    if (best[dst].time_h < 0.0) throw UnreachableNode(origin, destination);
    return best[dst];
}

DetourMetrics transition_detour(const RoadNetwork& net, const ChargingStation& station,
                                int from_node, int to_node) {
    const PathMetrics leg1 = net.fastest_path(from_node, station.node);
    const PathMetrics leg2 = net.fastest_path(station.node, to_node);
    const PathMetrics direct = net.fastest_path(from_node, to_node);
    return {leg1.time_h + leg2.time_h - direct.time_h,
            leg1.distance_km + leg2.distance_km - direct.distance_km};
}

MetricTable::MetricTable(const RoadNetwork& net, const std::vector<int>& node_ids) {
    std::vector<int> ids = node_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    n_ = ids.size();
    pos_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) pos_.emplace(ids[i], i);
    table_.assign(n_ * n_, PathMetrics{});
    for (std::size_t i = 0; i < n_; ++i) {
        auto best = net.fastest_paths_from(ids[i]);
        for (std::size_t j = 0; j < n_; ++j) {
            const PathMetrics& m = best[net.node_index(ids[j])];
            if (m.time_h < 0.0) throw UnreachableNode(ids[i], ids[j]);
            table_[i * n_ + j] = m;
        }
    }
}

const PathMetrics& MetricTable::metric(int from_id, int to_id) const {
    auto fi = pos_.find(from_id);
    if (fi == pos_.end()) throw UnknownNode(from_id);
    auto ti = pos_.find(to_id);
    if (ti == pos_.end()) throw UnknownNode(to_id);
    return table_[fi->second * n_ + ti->second];
}

DetourMetrics MetricTable::detour(int from_id, int via_id, int to_id) const {
    const PathMetrics& a = metric(from_id, via_id);
    const PathMetrics& b = metric(via_id, to_id);
    const PathMetrics& d = metric(from_id, to_id);
    return {a.time_h + b.time_h - d.time_h, a.distance_km + b.distance_km - d.distance_km};
}

std::pair<RoadNetwork, std::vector<ChargingStation>>
generate_grid(int rows, int cols, double block_km, double speed_kmh, int n_stations,
              std::uint64_t seed, double power_kw) {
    if (rows < 2 || cols < 2) throw InvalidDimension("grid needs at least 2x2 nodes");
    if (block_km <= 0.0 || speed_kmh <= 0.0)
        throw InvalidDimension("block_km and speed_kmh must be positive");
    if (n_stations < 0 || n_stations > rows * cols)
        throw InvalidDimension("n_stations must be within [0, rows*cols]");

    std::vector<RoadNode> nodes;
    nodes.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            nodes.push_back({r * cols + c, c * block_km, r * block_km});

    const double time_h = block_km / speed_kmh;
    std::vector<RoadArc> arcs;
    auto link = [&](int a, int b) {
        arcs.push_back({a, b, block_km, time_h});
        arcs.push_back({b, a, block_km, time_h});
    };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) link(r * cols + c, r * cols + c + 1);
            if (r + 1 < rows) link(r * cols + c, (r + 1) * cols + c);
        }

    // Farthest-point placement keeps stations spread evenly: the first pick is
    // seeded, each next maximizes the Euclidean distance to the chosen set.
    std::vector<ChargingStation> stations;
    if (n_stations > 0) {
        Rng rng(derive_seed(seed, SeedPurpose::GridStations));
        std::vector<int> chosen;
        chosen.push_back(rng.int_below(rows * cols));
        while (static_cast<int>(chosen.size()) < n_stations) {
            int best_node = -1;
            double best_dist = -1.0;
            for (const auto& nd : nodes) {
                if (std::find(chosen.begin(), chosen.end(), nd.id) != chosen.end()) continue;
                double dmin = std::numeric_limits<double>::infinity();
                for (int c : chosen) {
                    const auto& cn = nodes[c];
                    dmin = std::min(dmin, std::hypot(nd.x_km - cn.x_km, nd.y_km - cn.y_km));
                }
                if (dmin > best_dist) {
                    best_dist = dmin;
                    best_node = nd.id;
                }
            }
            chosen.push_back(best_node);
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i = 0; i < chosen.size(); ++i)
            stations.push_back({static_cast<int>(i) + 1, chosen[i], power_kw});
    }
    return {RoadNetwork(std::move(nodes), std::move(arcs)), std::move(stations)};
}

RoadNetwork load_network(const std::string& nodes_csv, const std::string& arcs_csv) {
    CsvTable nt = read_csv(nodes_csv);
    const std::size_t ci = nt.col("id", nodes_csv);
    const std::size_t cx = nt.col("x_km", nodes_csv);
    const std::size_t cy = nt.col("y_km", nodes_csv);
    std::vector<RoadNode> nodes;
    nodes.reserve(nt.rows.size());
    for (std::size_t r = 0; r < nt.rows.size(); ++r) {
        const auto& row = nt.rows[r];
        nodes.push_back({static_cast<int>(csv_int(row[ci], nodes_csv, r + 1)),
                         csv_double(row[cx], nodes_csv, r + 1),
                         csv_double(row[cy], nodes_csv, r + 1)});
    }
    CsvTable at = read_csv(arcs_csv);
    const std::size_t cf = at.col("from", arcs_csv);
    const std::size_t ct = at.col("to", arcs_csv);
    const std::size_t cd = at.col("distance_km", arcs_csv);
    const std::size_t ch = at.col("time_h", arcs_csv);
    std::vector<RoadArc> arcs;
    arcs.reserve(at.rows.size());
    for (std::size_t r = 0; r < at.rows.size(); ++r) {
        const auto& row = at.rows[r];
        arcs.push_back({static_cast<int>(csv_int(row[cf], arcs_csv, r + 1)),
                        static_cast<int>(csv_int(row[ct], arcs_csv, r + 1)),
                        csv_double(row[cd], arcs_csv, r + 1), csv_double(row[ch], arcs_csv, r + 1)});
    }
    return RoadNetwork(std::move(nodes), std::move(arcs));
}

std::vector<ChargingStation> load_stations(const std::string& stations_csv, const RoadNetwork& net) {
    CsvTable t = read_csv(stations_csv);
    const std::size_t ci = t.col("id", stations_csv);
    const std::size_t cn = t.col("node", stations_csv);
    const std::size_t cp = t.col("power_kw", stations_csv);
    std::vector<ChargingStation> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        ChargingStation s{static_cast<int>(csv_int(row[ci], stations_csv, r + 1)),
                          static_cast<int>(csv_int(row[cn], stations_csv, r + 1)),
                          csv_double(row[cp], stations_csv, r + 1)};
        if (!net.has_node(s.node)) throw UnknownNode(s.node);
        if (s.power_kw <= 0.0)
            throw ParseError(stations_csv, r + 1, "station power must be positive");
        out.push_back(s);
    }
    return out;
}

void write_network(const RoadNetwork& net, const std::string& nodes_csv, const std::string& arcs_csv) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(net.nodes().size());
    for (const auto& n : net.nodes())
        rows.push_back({std::to_string(n.id), format_double(n.x_km), format_double(n.y_km)});
    write_csv(nodes_csv, {"id", "x_km", "y_km"}, rows);
    rows.clear();
    rows.reserve(net.arcs().size());
    for (const auto& a : net.arcs())
        rows.push_back({std::to_string(a.from), std::to_string(a.to), format_double(a.distance_km),
                        format_double(a.time_h)});
    write_csv(arcs_csv, {"from", "to", "distance_km", "time_h"}, rows);
}

void write_stations(const std::vector<ChargingStation>& stations, const std::string& stations_csv) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(stations.size());
    for (const auto& s : stations)
        rows.push_back({std::to_string(s.id), std::to_string(s.node), format_double(s.power_kw)});
    write_csv(stations_csv, {"id", "node", "power_kw"}, rows);
}

} // namespace eamod
