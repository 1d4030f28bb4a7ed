#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>

#include "eamod/errors.hpp"
#include "eamod/road_network.hpp"

using namespace eamod;

namespace {

// Hand-built 4-node diamond: 0 -> 1 -> 3 is fast but long, 0 -> 2 -> 3 is
// slow but short. Lets us check the time-first, distance-tiebreak rule.
RoadNetwork diamond() {
    std::vector<RoadNode> nodes{{0, 0, 0}, {1, 1, 1}, {2, 1, -1}, {3, 2, 0}};
    std::vector<RoadArc> arcs{
        {0, 1, 4.0, 0.10}, {1, 3, 4.0, 0.10},  // 8 km in 0.2 h
        {0, 2, 1.0, 0.15}, {2, 3, 1.0, 0.15},  // 2 km in 0.3 h
    };
    return RoadNetwork(std::move(nodes), std::move(arcs));
}

}  // namespace

TEST_CASE("fastest path minimizes time, reports distance along that path") {
    RoadNetwork net = diamond();
    PathMetrics m = net.fastest_path(0, 3);
    CHECK(m.time_h == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(m.distance_km == doctest::Approx(8.0).epsilon(1e-12));
    PathMetrics self = net.fastest_path(2, 2);
    CHECK(self.time_h == 0.0);
    CHECK(self.distance_km == 0.0);
}

TEST_CASE("equal-time tie breaks toward smaller distance") {
    std::vector<RoadNode> nodes{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    std::vector<RoadArc> arcs{
        {0, 1, 5.0, 0.1}, {1, 3, 5.0, 0.1},  // 10 km, 0.2 h
        {0, 2, 2.0, 0.1}, {2, 3, 2.0, 0.1},  // 4 km, 0.2 h
    };
    RoadNetwork net(std::move(nodes), std::move(arcs));
    CHECK(net.fastest_path(0, 3).distance_km == doctest::Approx(4.0));
}

TEST_CASE("unreachable and unknown nodes throw") {
    std::vector<RoadNode> nodes{{0, 0, 0}, {1, 1, 0}, {7, 2, 0}};
    std::vector<RoadArc> arcs{{0, 1, 1.0, 0.1}};  // 7 is isolated
    RoadNetwork net(std::move(nodes), std::move(arcs));
    CHECK_THROWS_AS(net.fastest_path(0, 7), UnreachableNode);
    CHECK_THROWS_AS(net.fastest_path(0, 99), UnknownNode);
    CHECK_THROWS_AS(net.node_index(99), UnknownNode);
    CHECK(net.has_node(7));
    CHECK_FALSE(net.has_node(42));

    auto from0 = net.fastest_paths_from(0);
    CHECK(from0[net.node_index(1)].time_h == doctest::Approx(0.1));
    CHECK(from0[net.node_index(7)].time_h < 0.0);  // unreachable marker
}

TEST_CASE("arc validation") {
    std::vector<RoadNode> nodes{{0, 0, 0}, {1, 1, 0}};
    CHECK_THROWS_AS(RoadNetwork(nodes, {{0, 5, 1.0, 0.1}}), UnknownNode);
    CHECK_THROWS_AS(RoadNetwork(nodes, {{0, 1, -1.0, 0.1}}), InvalidDimension);
    CHECK_THROWS_AS(RoadNetwork(nodes, {{0, 1, 1.0, 0.0}}), InvalidDimension);
}

TEST_CASE("grid generator: size, symmetry, station placement") {
    auto [net, stations] = generate_grid(3, 4, 0.5, 30.0, 3, 7);
    CHECK(net.nodes().size() == 12);
    // Interior bidirectional grid: 2*(rows*(cols-1) + cols*(rows-1)) arcs.
    CHECK(net.arcs().size() == 2 * (3 * 3 + 4 * 2));
    for (const RoadArc& a : net.arcs()) {
        CHECK(a.distance_km == doctest::Approx(0.5));
        CHECK(a.time_h == doctest::Approx(0.5 / 30.0));
    }
    CHECK(stations.size() == 3);
    std::set<int> station_nodes;
    for (const auto& s : stations) {
        CHECK(net.has_node(s.node));
        CHECK(s.power_kw == doctest::Approx(6.0));
        station_nodes.insert(s.node);
    }
    CHECK(station_nodes.size() == 3);  // farthest-point placement never repeats

    // Opposite grid corners: Manhattan distance in both time and km.
    PathMetrics corner = net.fastest_path(0, 11);
    CHECK(corner.distance_km == doctest::Approx(0.5 * (2 + 3)));
    CHECK(corner.time_h == doctest::Approx(0.5 * 5 / 30.0));
}

TEST_CASE("grid generation is deterministic in the seed") {
    auto [net_a, st_a] = generate_grid(4, 4, 1.0, 30.0, 2, 42);
    auto [net_b, st_b] = generate_grid(4, 4, 1.0, 30.0, 2, 42);
    auto [net_c, st_c] = generate_grid(4, 4, 1.0, 30.0, 2, 43);
    REQUIRE(st_a.size() == st_b.size());
    for (std::size_t i = 0; i < st_a.size(); ++i) CHECK(st_a[i].node == st_b[i].node);
    CHECK(net_a.nodes().size() == net_c.nodes().size());
}

TEST_CASE("detour metrics are non-negative and zero for on-path stations") {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 1, 1);
    ChargingStation on_origin{0, 0, 6.0};
    DetourMetrics none = transition_detour(net, on_origin, 0, 4);
    CHECK(none.delta_time_h == doctest::Approx(0.0));
    CHECK(none.delta_distance_km == doctest::Approx(0.0));

    ChargingStation corner{1, 8, 6.0};  // far corner forces a real detour
    DetourMetrics far = transition_detour(net, corner, 0, 1);
    CHECK(far.delta_time_h > 0.0);
    CHECK(far.delta_distance_km > 0.0);
}

TEST_CASE("metric table covers referenced pairs and rejects gaps") {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 1, 1);
    MetricTable table(net, {0, 4, 8});
    CHECK(table.contains(4));
    CHECK_FALSE(table.contains(5));
    CHECK(table.metric(0, 8).distance_km == doctest::Approx(net.fastest_path(0, 8).distance_km));
    CHECK(table.metric(8, 8).time_h == 0.0);
    DetourMetrics d = table.detour(0, 4, 8);
    CHECK(d.delta_time_h == doctest::Approx(0.0));  // 4 lies on a fastest 0->8 path
}

TEST_CASE("network csv round trip preserves shape and metrics") {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 2, 5);
    write_network(net, "t_nodes.csv", "t_arcs.csv");
    write_stations(stations, "t_stations.csv");
    RoadNetwork back = load_network("t_nodes.csv", "t_arcs.csv");
    auto st_back = load_stations("t_stations.csv", back);
    CHECK(back.nodes().size() == net.nodes().size());
    CHECK(back.arcs().size() == net.arcs().size());
    REQUIRE(st_back.size() == stations.size());
    for (std::size_t i = 0; i < stations.size(); ++i) {
        CHECK(st_back[i].node == stations[i].node);
        CHECK(st_back[i].power_kw == doctest::Approx(stations[i].power_kw));
    }
    PathMetrics a = net.fastest_path(0, 8), b = back.fastest_path(0, 8);
    CHECK(a.time_h == doctest::Approx(b.time_h));
    CHECK(a.distance_km == doctest::Approx(b.distance_km));
    for (const char* f : {"t_nodes.csv", "t_arcs.csv", "t_stations.csv"}) std::remove(f);
}

TEST_CASE("loading rejects stations on unknown nodes") {
    auto [net, stations] = generate_grid(2, 2, 1.0, 30.0, 1, 1);
    {
        std::vector<ChargingStation> bogus{{0, 99, 6.0}};
        write_stations(bogus, "t_bad_stations.csv");
    }
    CHECK_THROWS_AS(load_stations("t_bad_stations.csv", net), UnknownNode);
    std::remove("t_bad_stations.csv");
    CHECK_THROWS_AS(load_network("no_such_nodes.csv", "no_such_arcs.csv"), IoError);
}
