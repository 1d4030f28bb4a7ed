#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "eamod/demand.hpp"
#include "eamod/economics.hpp"
#include "eamod/errors.hpp"
#include "eamod/milp_core.hpp"
#include "eamod/road_network.hpp"
#include "eamod/solver.hpp"
#include "eamod/transition_graph.hpp"

using namespace eamod;

namespace {

// Two chainable requests on a 3x3 unit grid with one station at the center.
// All six time-feasible pairs -- (0,1) (0,2) (0,3) (1,2) (1,3) (2,3) -- carry
// the station as a charge option, which makes hand counting easy.
struct ModelFixture {
    RoadNetwork net;
    std::vector<ChargingStation> stations;
    Tariff tariff;
    std::vector<TravelRequest> requests;
    TransitionDag dag;

    ModelFixture()
        : net(generate_grid(3, 3, 1.0, 30.0, 0, 1).first), stations{{0, 4, 6.0}} {
        requests.push_back(make_request(1, 0, 2, 1.0, net, tariff));
        requests.push_back(make_request(2, 6, 8, 2.0, net, tariff));
        dag = build_dag(requests, net, stations, 0, 60.0);
    }
};

int count_kind(const MilpModel& m, VarKey::Type t) {
    int n = 0;
    for (const auto& v : m.vars()) n += v.key.type == t ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("assembled model matches the hand inventory of a two-request fleet") {
    ModelFixture f;
    EconomicParams econ;
    MilpModel model = assemble_model(f.dag, 2, econ);

    CHECK(count_kind(model, VarKey::Type::Transition) == 12);
    CHECK(count_kind(model, VarKey::Type::ChargeStop) == 12);
    CHECK(count_kind(model, VarKey::Type::ChargeAmount) == 12);
    CHECK(count_kind(model, VarKey::Type::TransitionEnergy) == 12);
    CHECK(count_kind(model, VarKey::Type::Soc) == 8);
    CHECK(count_kind(model, VarKey::Type::Battery) == 2);
    CHECK(count_kind(model, VarKey::Type::VehicleUsed) == 2);
    CHECK(count_kind(model, VarKey::Type::RequestServed) == 2);

    const std::map<std::string, std::size_t> fam = model.rows_per_family();
    CHECK(fam.at("continuity") == 8);       // one per extended index per vehicle
    CHECK(fam.at("energy_balance") == 24);  // GE/LE pair per transition per vehicle
    CHECK(fam.at("transition_energy") == 48);
    CHECK(fam.at("charge_requires_transition") == 12);
    CHECK(fam.at("charge_cap") == 12);
    CHECK(fam.at("soc_bounds") == 8);
    CHECK(fam.at("vehicle_usage") == 12);
    CHECK(fam.at("battery_limit") == 2);
    CHECK(fam.at("boundary_energy") == 6);
    CHECK(fam.at("uniform_battery") == 2);
    CHECK(fam.at("fleet_order") == 1);
    CHECK(fam.at("serve_once") == 4);
    CHECK(fam.at("served_link") == 2);
    CHECK(fam.count("service_quota") == 0);
    CHECK(model.n_rows() == 141);
    CHECK(model.big_m_energy() > 0.0);

    // cost coefficients straight from the tariff and the amortization rates
    const int br1 = model.var_by_key({VarKey::Type::RequestServed, 1, -1, -1, -1});
    // fare: base + 1.5/km + 0.35/min over the 2 km, 4 minute trip
    CHECK(model.var(br1).objective ==
          doctest::Approx(-(2.55 + 1.5 * 2.0 + 0.35 * 4.0)).epsilon(1e-12));
    const int bv0 = model.var_by_key({VarKey::Type::VehicleUsed, -1, -1, 0, -1});
    CHECK(model.var(bv0).objective == doctest::Approx(4.8));
    const int eb0 = model.var_by_key({VarKey::Type::Battery, -1, -1, 0, -1});
    CHECK(model.var(eb0).objective == doctest::Approx(0.42));
    const int c_any = model.var_by_key({VarKey::Type::ChargeAmount, 1, 2, 0, 0});
    CHECK(model.var(c_any).objective == doctest::Approx(0.30));

    // semantic keys are a bijection onto the variables
    for (int j = 0; j < model.n_vars(); ++j) CHECK(model.var_by_key(model.var(j).key) == j);
}

TEST_CASE("later vehicles may not start below their own index") {
    ModelFixture f;
    EconomicParams econ;
    MilpModel model = assemble_model(f.dag, 2, econ);

    const int x0_01 = model.var_by_key({VarKey::Type::Transition, 0, 1, 0, -1});
    const int x1_01 = model.var_by_key({VarKey::Type::Transition, 0, 1, 1, -1});
    const int x1_02 = model.var_by_key({VarKey::Type::Transition, 0, 2, 1, -1});
    CHECK(model.var(x0_01).upper == 1.0);
    CHECK(model.var(x1_01).upper == 0.0);  // vehicle 1 must start at request >= 2
    CHECK(model.var(x1_02).upper == 1.0);

    // the time-infeasible reverse pair produced no variable at all
    CHECK(model.var_by_key({VarKey::Type::Transition, 2, 1, 0, -1}) == -1);
}

TEST_CASE("pinning the battery removes the transition-energy machinery") {
    ModelFixture f;
    EconomicParams econ;
    ModelOptions opt;
    opt.fixed_battery_kwh = 20.0;
    MilpModel fixed = assemble_model(f.dag, 2, econ, opt);
    MilpModel free_b = assemble_model(f.dag, 2, econ);

    CHECK(count_kind(fixed, VarKey::Type::TransitionEnergy) == 0);
    const auto fam = fixed.rows_per_family();
    CHECK(fam.count("transition_energy") == 0);
    CHECK(fam.count("uniform_battery") == 0);
    CHECK(fam.at("fixed_battery") == 2);

    const int eb0 = fixed.var_by_key({VarKey::Type::Battery, -1, -1, 0, -1});
    CHECK(fixed.var(eb0).upper == 20.0);
    const int soc = fixed.var_by_key({VarKey::Type::Soc, 1, -1, 0, -1});
    CHECK(fixed.var(soc).upper == 20.0);

    // consumption scales with the pinned size, so the big-M tightens too
    CHECK(fixed.big_m_energy() < free_b.big_m_energy());
    CHECK(fixed.n_rows() < free_b.n_rows());
}

TEST_CASE("pinned battery at the free optimum reproduces the free objective") {
    ModelFixture f;
    EconomicParams econ;
    MilpModel free_model = assemble_model(f.dag, 2, econ);
    auto [free_sol, free_rep] = solve_fleet(free_model, f.dag);
    REQUIRE(free_rep.status == SolveStatus::Optimal);
    REQUIRE(free_sol.vehicles[0].used);
    const double e_star = free_sol.vehicles[0].battery_kwh;

    ModelOptions opt;
    opt.fixed_battery_kwh = e_star;
    MilpModel pinned = assemble_model(f.dag, 2, econ, opt);
    auto [pin_sol, pin_rep] = solve_fleet(pinned, f.dag);
    REQUIRE(pin_rep.status == SolveStatus::Optimal);
    CHECK(pin_sol.objective_eur == doctest::Approx(free_sol.objective_eur).epsilon(1e-6));
}

TEST_CASE("solver output survives the independent feasibility replay") {
    ModelFixture f;
    EconomicParams econ;
    ModelOptions opt;  // defaults: homogeneous, no pin, no quota
    MilpModel model = assemble_model(f.dag, 2, econ, opt);
    auto [sol, rep] = solve_fleet(model, f.dag);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(sol.objective_eur < 0.0);  // both fares beat one small vehicle

    CHECK(check_feasibility(f.dag, econ, 2, opt, sol, 1e-6).empty());
    CHECK(objective_value(sol, f.dag.extended, econ) ==
          doctest::Approx(sol.objective_eur).epsilon(1e-9));
    CHECK(sol.served[1]);
    CHECK(sol.served[2]);
}

TEST_CASE("service quota forces unprofitable work and flags impossible loads") {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 1, 1);
    Tariff tariff;
    EconomicParams econ;

    // One 1 km hop earns ~4.09 but a vehicle-day costs >= 9: left unserved.
    std::vector<TravelRequest> small{make_request(1, 0, 1, 1.0, net, tariff)};
    TransitionDag dag = build_dag(small, net, stations, 0, 60.0);
    MilpModel lazy = assemble_model(dag, 1, econ);
    auto [sol0, rep0] = solve_fleet(lazy, dag);
    REQUIRE(rep0.status == SolveStatus::Optimal);
    CHECK(sol0.objective_eur == doctest::Approx(0.0));
    CHECK_FALSE(sol0.served[1]);

    ModelOptions quota;
    quota.min_served = 1;
    MilpModel forced = assemble_model(dag, 1, econ, quota);
    CHECK(forced.rows_per_family().at("service_quota") == 1);
    auto [sol1, rep1] = solve_fleet(forced, dag);
    REQUIRE(rep1.status == SolveStatus::Optimal);
    CHECK(sol1.served[1]);
    CHECK(sol1.objective_eur > 0.0);

    // the relaxed solution violates the quota when re-checked against it
    auto viols = check_feasibility(dag, econ, 1, quota, sol0, 1e-6);
    REQUIRE(viols.size() == 1);
    CHECK(viols[0].family == "service_quota");

    // two simultaneous requests cannot both be served by a single vehicle
    std::vector<TravelRequest> clash{make_request(1, 0, 2, 1.0, net, tariff),
                                     make_request(2, 6, 8, 1.0, net, tariff)};
    TransitionDag dag2 = build_dag(clash, net, stations, 0, 60.0);
    ModelOptions q2;
    q2.min_served = 2;
    MilpModel impossible = assemble_model(dag2, 1, econ, q2);
    MilpResult res = solve_milp(impossible);
    CHECK(res.report.status == SolveStatus::Infeasible);
}

TEST_CASE("an empty request set yields the all-idle optimum") {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 1, 1);
    TransitionDag dag = build_dag({}, net, stations, 0, 60.0);
    EconomicParams econ;
    MilpModel model = assemble_model(dag, 2, econ);
    auto [sol, rep] = solve_fleet(model, dag);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(sol.objective_eur == doctest::Approx(0.0));
    for (const auto& v : sol.vehicles) CHECK_FALSE(v.used);
    CHECK(check_feasibility(dag, econ, 2, {}, sol, 1e-6).empty());
}

TEST_CASE("model summary dumps counts per family as json") {
    ModelFixture f;
    EconomicParams econ;
    MilpModel model = assemble_model(f.dag, 2, econ);
    write_model_summary(model, "t_model_summary.json");
    std::ifstream in("t_model_summary.json");
    REQUIRE(in.good());
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.at("n_vars").get<int>() == model.n_vars());
    CHECK(j.at("n_rows").get<int>() == 141);
    CHECK(j.at("n_binary").get<int>() == 12 + 12 + 2 + 2);
    CHECK(j.at("rows_per_family").at("continuity").get<int>() == 8);
    CHECK(j.at("big_m_energy").get<double>() == doctest::Approx(model.big_m_energy()));
    in.close();
    std::remove("t_model_summary.json");
}
