#include "eamod/demand.hpp"

#include <algorithm>
#include <tuple>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"
#include "eamod/rng.hpp"

namespace eamod {

double price(double service_distance_km, double service_time_h, const Tariff& tariff) {
    return tariff.alpha_eur + tariff.beta_eur_per_km * service_distance_km +
           tariff.gamma_eur_per_min * service_time_h * 60.0;
}

TravelRequest make_request(int id, int origin, int destination, double start_time_h,
                           const RoadNetwork& net, const Tariff& tariff) {
    if (origin == destination) throw SelfLoopRequest(id);
    const PathMetrics m = net.fastest_path(origin, destination);
    TravelRequest r;
    r.id = id;
    r.origin = origin;
    r.destination = destination;
    r.start_time_h = start_time_h;
    r.service_time_h = m.time_h;
    r.service_distance_km = m.distance_km;
    r.end_time_h = start_time_h + m.time_h;
    r.price_eur = price(m.distance_km, m.time_h, tariff);
    return r;
}

namespace {

void sort_by_start(std::vector<TravelRequest>& v) {
    std::sort(v.begin(), v.end(), [](const TravelRequest& a, const TravelRequest& b) {
        return std::tie(a.start_time_h, a.id) < std::tie(b.start_time_h, b.id);
    });
}

} // namespace

std::vector<TravelRequest> load_requests(const std::string& path, const RoadNetwork& net,
                                         const Tariff& tariff) {
    CsvTable t = read_csv(path);
    const std::size_t ci = t.col("id", path);
    const std::size_t co = t.col("origin", path);
    const std::size_t cd = t.col("destination", path);
    const std::size_t cs = t.col("start_time_h", path);
    std::vector<TravelRequest> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int id = static_cast<int>(csv_int(row[ci], path, r + 1));
        const int origin = static_cast<int>(csv_int(row[co], path, r + 1));
        const int destination = static_cast<int>(csv_int(row[cd], path, r + 1));
        const double start = csv_double(row[cs], path, r + 1);
        if (start < 0.0) throw ParseError(path, r + 1, "start_time_h must be >= 0");
        if (!net.has_node(origin)) throw UnknownNode(origin);
        if (!net.has_node(destination)) throw UnknownNode(destination);
        out.push_back(make_request(id, origin, destination, start, net, tariff));
    }
    sort_by_start(out);
    return out;
}

void write_requests(const std::vector<TravelRequest>& requests, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(requests.size());
    for (const auto& r : requests)
        rows.push_back({std::to_string(r.id), std::to_string(r.origin),
                        std::to_string(r.destination), format_double(r.start_time_h)});
    write_csv(path, {"id", "origin", "destination", "start_time_h"}, rows);
}

std::vector<TravelRequest> synth_requests(int n, double window_h, const RoadNetwork& net,
                                          const Tariff& tariff, std::uint64_t seed) {
    if (n < 0) throw InvalidDimension("request count must be >= 0");
    if (window_h <= 0.0) throw InvalidDimension("window_h must be positive");
    if (n > 0 && net.nodes().size() < 2)
        throw InvalidDimension("need at least 2 nodes to synthesize requests");
    Rng rng(derive_seed(seed, SeedPurpose::SynthRequests));
    const int n_nodes = static_cast<int>(net.nodes().size());
    struct Draw {
        double start;
        int origin, destination;
    };
    std::vector<Draw> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double start = rng.uniform(0.0, window_h);
        const int oi = rng.int_below(n_nodes);
        int di = rng.int_below(n_nodes - 1);
        if (di >= oi) ++di; // uniform over nodes != origin
        draws.push_back({start, net.nodes()[oi].id, net.nodes()[di].id});
    }
    std::sort(draws.begin(), draws.end(), [](const Draw& a, const Draw& b) {
        return std::tie(a.start, a.origin, a.destination) < std::tie(b.start, b.origin, b.destination);
    });
    std::vector<TravelRequest> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(make_request(i + 1, draws[i].origin, draws[i].destination, draws[i].start,
                                   net, tariff));
    return out;
}

std::vector<TravelRequest> sample_subproblem(const std::vector<TravelRequest>& requests, int n,
                                             std::uint64_t seed) {
    if (n < 0 || static_cast<std::size_t>(n) > requests.size())
        throw SampleTooLarge(n, requests.size());
    Rng rng(derive_seed(seed, SeedPurpose::Subsample));
    std::vector<std::size_t> idx(requests.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // partial Fisher-Yates: the first n slots are a uniform subset
    for (int i = 0; i < n; ++i) {
        const std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    std::vector<TravelRequest> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(requests[idx[i]]);
    sort_by_start(out);
    return out;
}

} // namespace eamod
