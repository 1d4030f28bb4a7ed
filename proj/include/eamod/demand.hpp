#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eamod/road_network.hpp"

namespace eamod {

/// A travel request plus fields derived from the road network: the service
/// leg uses the fastest path from origin to destination, and
/// end_time_h = start_time_h + service_time_h exactly.
struct TravelRequest {
    int id = 0;
    int origin = 0;
    int destination = 0;
    double start_time_h = 0.0;
    double service_time_h = 0.0;
    double service_distance_km = 0.0;
    double end_time_h = 0.0;
    double price_eur = 0.0;
};

/// Fare model: price = alpha + beta * distance + gamma * minutes.
struct Tariff {
    double alpha_eur = 2.55;
    double beta_eur_per_km = 1.5;
    double gamma_eur_per_min = 0.35;
};

double price(double service_distance_km, double service_time_h, const Tariff& tariff);

/// Builds a request with derived fields from the network's fastest path.
/// Throws SelfLoopRequest when origin == destination.
TravelRequest make_request(int id, int origin, int destination, double start_time_h,
                           const RoadNetwork& net, const Tariff& tariff);

/// CSV columns: id,origin,destination,start_time_h. Result is sorted by
/// start time ascending, then id.
std::vector<TravelRequest> load_requests(const std::string& path, const RoadNetwork& net,
                                         const Tariff& tariff);

void write_requests(const std::vector<TravelRequest>& requests, const std::string& path);

/// n requests with start times i.i.d. uniform on [0, window_h) and
/// origin/destination uniform over distinct node pairs. Ids 1..n follow the
/// time ordering. Deterministic per seed.
std::vector<TravelRequest> synth_requests(int n, double window_h, const RoadNetwork& net,
                                          const Tariff& tariff, std::uint64_t seed);

/// Uniform subset of size n without replacement, re-sorted by start time
/// (then id). Throws SampleTooLarge when n exceeds the input size.
std::vector<TravelRequest> sample_subproblem(const std::vector<TravelRequest>& requests, int n,
                                             std::uint64_t seed);

} // namespace eamod
