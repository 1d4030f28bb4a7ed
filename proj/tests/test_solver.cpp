#include <doctest.h>

#include <cmath>
#include <vector>

#include "eamod/brute_force.hpp"
#include "eamod/demand.hpp"
#include "eamod/economics.hpp"
#include "eamod/milp_core.hpp"
#include "eamod/road_network.hpp"
#include "eamod/rng.hpp"
#include "eamod/solver.hpp"
#include "eamod/transition_graph.hpp"

using namespace eamod;

namespace {

struct RandomInstance {
    RoadNetwork net;
    std::vector<ChargingStation> stations;
    TransitionDag dag;
};

// tiny random instance within the exhaustive oracle's reach
RandomInstance random_instance(std::uint64_t seed, int n_requests, int n_stations) {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, n_stations, seed);
    Tariff tariff;
    auto reqs = synth_requests(n_requests, 8.0, net, tariff, seed + 1000);
    TransitionDag dag = build_dag(reqs, net, stations, 0, 60.0);
    return {std::move(net), std::move(stations), std::move(dag)};
}

}  // namespace

TEST_CASE("branch and bound matches the exhaustive oracle on tiny fleets") {
    EconomicParams econ;
    ModelOptions het;
    het.homogeneous = false;  // the oracle enumerates heterogeneous fleets
    for (std::uint64_t seed : {3u, 7u, 11u, 19u, 23u}) {
        const int n = 2 + static_cast<int>(seed % 3);
        RandomInstance inst = random_instance(seed, n, 1 + seed % 2);
        FleetSolution ref = brute_force(inst.dag, 2, econ);

        MilpModel model = assemble_model(inst.dag, 2, econ, het);
        auto [sol, rep] = solve_fleet(model, inst.dag);
        REQUIRE(rep.status == SolveStatus::Optimal);
        CHECK(sol.objective_eur == doctest::Approx(ref.objective_eur).epsilon(1e-6));
        CHECK(check_feasibility(inst.dag, econ, 2, het, sol, 1e-6).empty());
    }
}

TEST_CASE("incumbent binaries come back snapped to integers") {
    RandomInstance inst = random_instance(5, 4, 2);
    EconomicParams econ;
    MilpModel model = assemble_model(inst.dag, 2, econ);
    MilpResult res = solve_milp(model);
    REQUIRE(res.report.status == SolveStatus::Optimal);
    REQUIRE(static_cast<int>(res.x.size()) == model.n_vars());
    for (int j = 0; j < model.n_vars(); ++j) {
        if (model.var(j).kind != VarKind::Binary) continue;
        CHECK(std::abs(res.x[j] - std::round(res.x[j])) == 0.0);
    }
    // the proven bound brackets the incumbent
    CHECK(res.report.bound_eur <= res.report.objective_eur + 1e-9);
    CHECK(res.report.gap_eur == doctest::Approx(res.report.objective_eur -
                                                res.report.bound_eur));
}

TEST_CASE("the search is deterministic run to run") {
    RandomInstance inst = random_instance(9, 4, 1);
    EconomicParams econ;
    MilpModel model = assemble_model(inst.dag, 2, econ);
    MilpResult a = solve_milp(model);
    MilpResult b = solve_milp(model);
    REQUIRE(a.report.status == SolveStatus::Optimal);
    REQUIRE(b.report.status == SolveStatus::Optimal);
    CHECK(a.report.objective_eur == b.report.objective_eur);
    CHECK(a.report.nodes_explored == b.report.nodes_explored);
    CHECK(a.x == b.x);
}

TEST_CASE("node and time limits cut the search off honestly") {
    RandomInstance inst = random_instance(13, 5, 2);
    EconomicParams econ;
    MilpModel model = assemble_model(inst.dag, 3, econ);

    SolveOptions one_node;
    one_node.node_limit = 1;
    MilpResult res = solve_milp(model, one_node);
    CHECK(res.report.status != SolveStatus::Infeasible);
    CHECK(res.report.nodes_explored <= 2);  // the limit is checked per dequeue

    SolveOptions no_time;
    no_time.time_limit_s = 0.0;
    MilpResult res2 = solve_milp(model, no_time);
    CHECK((res2.report.status == SolveStatus::TimeLimit ||
           res2.report.status == SolveStatus::Feasible));

    // with a limit-status result, any incumbent must still be in-bounds
    if (res2.report.status == SolveStatus::Feasible) {
        REQUIRE(!res2.x.empty());
        CHECK(res2.report.bound_eur <= res2.report.objective_eur + 1e-9);
    }
}

TEST_CASE("fleet extraction reads schedules, charges and batteries off the incumbent") {
    RandomInstance inst = random_instance(21, 4, 2);
    EconomicParams econ;
    MilpModel model = assemble_model(inst.dag, 2, econ);
    REQUIRE(has_fleet_keys(model));
    MilpResult res = solve_milp(model);
    REQUIRE(res.report.status == SolveStatus::Optimal);

    FleetSolution sol = extract_fleet_solution(model, inst.dag, res.x, res.report.status,
                                               res.report.objective_eur, res.report.gap_eur);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_eur == doctest::Approx(res.report.objective_eur));
    REQUIRE(sol.vehicles.size() == 2);

    const int last = inst.dag.extended.end_index();
    int served_total = 0;
    for (const auto& v : sol.vehicles) {
        if (!v.used) {
            // idle vehicles hold the depot-to-depot stub
            CHECK(v.schedule == std::vector<int>{0, last});
            CHECK(v.charge_events.empty());
            continue;
        }
        REQUIRE(v.schedule.size() >= 2);
        CHECK(v.schedule.front() == 0);
        CHECK(v.schedule.back() == last);
        served_total += static_cast<int>(v.schedule.size()) - 2;
        // schedules follow time order through the dag
        for (std::size_t s = 0; s + 1 < v.schedule.size(); ++s)
            CHECK(inst.dag.bounds.at(v.schedule[s], v.schedule[s + 1]).x_ub);
    }
    int flagged = 0;
    for (int i = 1; i < last; ++i) flagged += sol.served[i] ? 1 : 0;
    CHECK(flagged == served_total);

    // the independent recount agrees with the solver's objective
    CHECK(objective_value(sol, inst.dag.extended, econ) ==
          doctest::Approx(res.report.objective_eur).epsilon(1e-9));
}

TEST_CASE("oracle and solver agree that an unprofitable request stays unserved") {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 1, 2);
    Tariff tariff;
    EconomicParams econ;
    std::vector<TravelRequest> reqs{make_request(1, 0, 1, 2.0, net, tariff)};
    TransitionDag dag = build_dag(reqs, net, stations, 0, 60.0);

    FleetSolution ref = brute_force(dag, 2, econ);
    CHECK(ref.objective_eur == doctest::Approx(0.0));

    ModelOptions het;
    het.homogeneous = false;
    MilpModel model = assemble_model(dag, 2, econ, het);
    auto [sol, rep] = solve_fleet(model, dag);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(sol.objective_eur == doctest::Approx(0.0));
    CHECK_FALSE(sol.served[1]);
}
