#include <doctest.h>

#include <cmath>
#include <vector>

#include "eamod/demand.hpp"
#include "eamod/economics.hpp"
#include "eamod/lp.hpp"
#include "eamod/milp_core.hpp"
#include "eamod/road_network.hpp"
#include "eamod/transition_graph.hpp"

using namespace eamod;

namespace {

int var(MilpModel& m, const std::string& name, double lb, double ub, double cost) {
    return m.add_var({name, VarKind::Continuous, lb, ub, cost, {}});
}

int row(MilpModel& m, const std::string& name, RowSense sense, double rhs) {
    return m.add_row({name, sense, rhs, "test"});
}

// the two-request fleet relaxation used for warm-start checks
MilpModel fleet_model() {
    static RoadNetwork net = generate_grid(3, 3, 1.0, 30.0, 0, 1).first;
    std::vector<ChargingStation> stations{{0, 4, 6.0}};
    Tariff tariff;
    std::vector<TravelRequest> reqs{make_request(1, 0, 2, 1.0, net, tariff),
                                    make_request(2, 6, 8, 2.0, net, tariff)};
    TransitionDag dag = build_dag(reqs, net, stations, 0, 60.0);
    return assemble_model(dag, 2, EconomicParams{});
}

}  // namespace

TEST_CASE("textbook maximization solved through variable bounds") {
    // max 3x + 5y with x <= 4, y <= 6, 3x + 2y <= 18: optimum (2, 6), 36.
    MilpModel m;
    int x = var(m, "x", 0.0, 4.0, -3.0);
    int y = var(m, "y", 0.0, 6.0, -5.0);
    int r = row(m, "cap", RowSense::LE, 18.0);
    m.add_coeff(r, x, 3.0);
    m.add_coeff(r, y, 2.0);
    m.finalize();

    SimplexLp lp(m);
    LpResult res = lp.solve();
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(-36.0).epsilon(1e-9));
    CHECK(lp.value(x) == doctest::Approx(2.0));
    CHECK(lp.value(y) == doctest::Approx(6.0));
}

TEST_CASE("equality and ge rows pin the optimal corner") {
    // min x + 2y with x + y = 10, x - y >= 2, 0 <= x,y <= 10: (10, 0).
    MilpModel m;
    int x = var(m, "x", 0.0, 10.0, 1.0);
    int y = var(m, "y", 0.0, 10.0, 2.0);
    int r1 = row(m, "sum", RowSense::EQ, 10.0);
    m.add_coeff(r1, x, 1.0);
    m.add_coeff(r1, y, 1.0);
    int r2 = row(m, "gap", RowSense::GE, 2.0);
    m.add_coeff(r2, x, 1.0);
    m.add_coeff(r2, y, -1.0);
    m.finalize();

    SimplexLp lp(m);
    LpResult res = lp.solve();
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(10.0));
    CHECK(lp.value(x) == doctest::Approx(10.0));
    CHECK(lp.value(y) == doctest::Approx(0.0));
}

TEST_CASE("negative lower bounds participate in the optimum") {
    // min x with x >= -5, y in [0, 1], x + y >= -3: x = -4 at y = 1.
    MilpModel m;
    int x = var(m, "x", -5.0, 5.0, 1.0);
    int y = var(m, "y", 0.0, 1.0, 0.0);
    int r = row(m, "floor", RowSense::GE, -3.0);
    m.add_coeff(r, x, 1.0);
    m.add_coeff(r, y, 1.0);
    m.finalize();

    SimplexLp lp(m);
    LpResult res = lp.solve();
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(-4.0));
    CHECK(lp.value(x) == doctest::Approx(-4.0));
}

TEST_CASE("contradictory rows report infeasible") {
    MilpModel m;
    int x = var(m, "x", 0.0, 5.0, 1.0);
    int y = var(m, "y", 0.0, 5.0, 1.0);
    int r1 = row(m, "low", RowSense::LE, 1.0);
    m.add_coeff(r1, x, 1.0);
    m.add_coeff(r1, y, 1.0);
    int r2 = row(m, "high", RowSense::GE, 3.0);
    m.add_coeff(r2, x, 1.0);
    m.add_coeff(r2, y, 1.0);
    m.finalize();

    SimplexLp lp(m);
    CHECK(lp.solve().status == LpStatus::Infeasible);

    // an empty feasible box caused by crossed variable bounds, via rows
    MilpModel m2;
    int z = var(m2, "z", 2.0, 4.0, 1.0);
    int r3 = row(m2, "cap", RowSense::LE, 1.0);
    m2.add_coeff(r3, z, 1.0);
    m2.finalize();
    SimplexLp lp2(m2);
    CHECK(lp2.solve().status == LpStatus::Infeasible);
}

TEST_CASE("fleet relaxation satisfies every row at the reported optimum") {
    MilpModel m = fleet_model();
    SimplexLp lp(m);
    LpResult res = lp.solve();
    REQUIRE(res.status == LpStatus::Optimal);

    const std::vector<double>& x = lp.values();
    REQUIRE(static_cast<int>(x.size()) == m.n_vars());
    double obj = 0.0;
    for (int j = 0; j < m.n_vars(); ++j) {
        obj += m.var(j).objective * x[j];
        CHECK(x[j] >= m.var(j).lower - 1e-7);
        CHECK(x[j] <= m.var(j).upper + 1e-7);
    }
    CHECK(obj == doctest::Approx(res.objective).epsilon(1e-9));
    for (int r = 0; r < m.n_rows(); ++r) {
        double a = 0.0;
        for (const auto* e = m.row_begin(r); e != m.row_end(r); ++e) a += e->coeff * x[e->var];
        switch (m.row(r).sense) {
            case RowSense::LE: CHECK(a <= m.row(r).rhs + 1e-6); break;
            case RowSense::GE: CHECK(a >= m.row(r).rhs - 1e-6); break;
            case RowSense::EQ: CHECK(a == doctest::Approx(m.row(r).rhs).epsilon(1e-6)); break;
        }
    }

    // serving both requests is profitable, so the relaxation dips below zero
    CHECK(res.objective < 0.0);
}

TEST_CASE("warm re-solve after a bound change matches a cold solve") {
    MilpModel m = fleet_model();
    SimplexLp warm(m);
    REQUIRE(warm.solve().status == LpStatus::Optimal);

    // branch: forbid the first vehicle's direct depot exit to request 1
    const int xvar = m.var_by_key({VarKey::Type::Transition, 0, 1, 0, -1});
    REQUIRE(xvar >= 0);
    warm.set_bounds(xvar, 0.0, 0.0);
    LpResult warm_res = warm.solve();

    SimplexLp cold(m);
    cold.set_bounds(xvar, 0.0, 0.0);
    LpResult cold_res = cold.solve();

    REQUIRE(warm_res.status == LpStatus::Optimal);
    REQUIRE(cold_res.status == LpStatus::Optimal);
    CHECK(warm_res.objective == doctest::Approx(cold_res.objective).epsilon(1e-9));

    // restoring the bound recovers the original optimum as well
    warm.set_bounds(xvar, 0.0, 1.0);
    SimplexLp fresh(m);
    CHECK(warm.solve().objective == doctest::Approx(fresh.solve().objective).epsilon(1e-9));
}

TEST_CASE("cutoff re-solves return a bound between cutoff and the true optimum") {
    MilpModel m = fleet_model();
    SimplexLp lp(m);
    LpResult base = lp.solve();
    REQUIRE(base.status == LpStatus::Optimal);

    const int xvar = m.var_by_key({VarKey::Type::Transition, 0, 1, 0, -1});
    lp.set_bounds(xvar, 1.0, 1.0);  // forcing the arc can only cost more
    SimplexLp ref(m);
    ref.set_bounds(xvar, 1.0, 1.0);
    LpResult truth = ref.solve();
    REQUIRE(truth.status == LpStatus::Optimal);

    // early cutoff stops still return a valid lower bound on the restriction
    LpResult res = lp.solve(base.objective + 1e-6);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective >= base.objective - 1e-9);
    CHECK(res.objective <= truth.objective + 1e-9);
}

TEST_CASE("reset_basis discards state but not the answer") {
    MilpModel m = fleet_model();
    SimplexLp lp(m);
    LpResult first = lp.solve();
    lp.reset_basis();
    LpResult second = lp.solve();
    CHECK(second.objective == doctest::Approx(first.objective).epsilon(1e-9));
    CHECK(lp.stats().refactors >= 1);
}
