#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "eamod/demand.hpp"
#include "eamod/economics.hpp"
#include "eamod/errors.hpp"
#include "eamod/milp_core.hpp"
#include "eamod/mps.hpp"
#include "eamod/road_network.hpp"
#include "eamod/solver.hpp"
#include "eamod/transition_graph.hpp"

using namespace eamod;

namespace {

MilpModel small_fleet_model(std::uint64_t seed, int n_requests) {
    auto [net, stations] = generate_grid(3, 3, 1.0, 30.0, 1, seed);
    Tariff tariff;
    auto reqs = synth_requests(n_requests, 8.0, net, tariff, seed + 7);
    TransitionDag dag = build_dag(reqs, net, stations, 0, 60.0);
    return assemble_model(dag, 2, EconomicParams{});
}

}  // namespace

TEST_CASE("interchange round trip preserves the model verbatim") {
    MilpModel model = small_fleet_model(4, 3);
    write_mps(model, "t_round.mps");
    MilpModel back = read_mps("t_round.mps");

    REQUIRE(back.n_vars() == model.n_vars());
    REQUIRE(back.n_rows() == model.n_rows());
    for (int j = 0; j < model.n_vars(); ++j) {
        CHECK(back.var(j).name == model.var(j).name);  // sidecar restores names
        CHECK(back.var(j).kind == model.var(j).kind);
        CHECK(back.var(j).lower == model.var(j).lower);
        CHECK(back.var(j).upper == model.var(j).upper);
        CHECK(back.var(j).objective == model.var(j).objective);
    }
    for (int r = 0; r < model.n_rows(); ++r) {
        CHECK(back.row(r).name == model.row(r).name);
        CHECK(back.row(r).sense == model.row(r).sense);
        CHECK(back.row(r).rhs == model.row(r).rhs);
        // the importer rebuilds rows column-major, so compare as sets
        auto entries = [](const MilpModel& m, int row) {
            std::vector<std::pair<int, double>> out;
            for (const auto* e = m.row_begin(row); e != m.row_end(row); ++e)
                out.emplace_back(e->var, e->coeff);
            std::sort(out.begin(), out.end());
            return out;
        };
        CHECK(entries(model, r) == entries(back, r));
    }
    // interchange files carry no fleet semantics
    CHECK_FALSE(has_fleet_keys(back));
    CHECK(has_fleet_keys(model));

    std::remove("t_round.mps");
    std::remove("t_round.mps.names.json");
}

TEST_CASE("re-imported models solve to the original objective") {
    for (std::uint64_t seed : {1u, 6u, 14u}) {
        MilpModel model = small_fleet_model(seed, 2 + static_cast<int>(seed % 3));
        MilpResult direct = solve_milp(model);
        REQUIRE(direct.report.status == SolveStatus::Optimal);

        write_mps(model, "t_resolve.mps");
        MilpModel back = read_mps("t_resolve.mps");
        MilpResult again = solve_milp(back);
        REQUIRE(again.report.status == SolveStatus::Optimal);
        CHECK(again.report.objective_eur ==
              doctest::Approx(direct.report.objective_eur).epsilon(1e-9));
    }
    std::remove("t_resolve.mps");
    std::remove("t_resolve.mps.names.json");
}

TEST_CASE("fixed-format sections appear in order with integer markers") {
    MilpModel model = small_fleet_model(2, 2);
    write_mps(model, "t_format.mps");
    std::ifstream in("t_format.mps");
    REQUIRE(in.good());
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();

    auto find = [&](const std::string& tag) {
        for (std::size_t i = 0; i < lines.size(); ++i)
            if (lines[i].rfind(tag, 0) == 0) return static_cast<long>(i);
        return -1L;
    };
    const long name = find("NAME");
    const long rows = find("ROWS");
    const long cols = find("COLUMNS");
    const long rhs = find("RHS");
    const long bounds = find("BOUNDS");
    const long endata = find("ENDATA");
    CHECK(name == 0);
    CHECK(rows > name);
    CHECK(cols > rows);
    CHECK(rhs > cols);
    CHECK(bounds > rhs);
    CHECK(endata > bounds);

    int intorg = 0, intend = 0;
    for (const auto& l : lines) {
        if (l.find("'MARKER'") != std::string::npos) {
            if (l.find("INTORG") != std::string::npos) ++intorg;
            if (l.find("INTEND") != std::string::npos) ++intend;
        }
    }
    CHECK(intorg == intend);
    CHECK(intorg >= 1);  // the model has binary variables

    // one objective row, sense N
    int n_rows_sense = 0;
    for (long i = rows + 1; i < cols; ++i)
        if (lines[i].size() > 1 && lines[i][1] == 'N') ++n_rows_sense;
    CHECK(n_rows_sense == 1);
    std::remove("t_format.mps");
    std::remove("t_format.mps.names.json");
}

TEST_CASE("reader rejects missing files and malformed content") {
    CHECK_THROWS_AS(read_mps("no_such_file.mps"), IoError);

    {
        std::ofstream out("t_bad.mps");
        out << "NAME garbled\nROWS\n Z obj\nENDATA\n";  // invalid row sense Z
    }
    CHECK_THROWS_AS(read_mps("t_bad.mps"), ParseError);
    std::remove("t_bad.mps");

    {
        std::ofstream out("t_frac.mps");
        out << "NAME t\nROWS\n N obj\n L r1\nCOLUMNS\n"
               "    MARKER                 'MARKER'                 'INTORG'\n"
               "    x obj 1.0 r1 1.0\n"
               "    MARKER                 'MARKER'                 'INTEND'\n"
               "RHS\n    rhs r1 5.0\nBOUNDS\n UP bnd x 2.5\nENDATA\n";
    }
    // integer columns must be binary-bounded in this subset
    CHECK_THROWS_AS(read_mps("t_frac.mps"), ParseError);
    std::remove("t_frac.mps");
}

TEST_CASE("round trip works without the name sidecar") {
    MilpModel model = small_fleet_model(8, 2);
    write_mps(model, "t_nosidecar.mps");
    std::remove("t_nosidecar.mps.names.json");
    MilpModel back = read_mps("t_nosidecar.mps");
    REQUIRE(back.n_vars() == model.n_vars());
    REQUIRE(back.n_rows() == model.n_rows());

    MilpResult direct = solve_milp(model);
    MilpResult again = solve_milp(back);
    REQUIRE(direct.report.status == SolveStatus::Optimal);
    REQUIRE(again.report.status == SolveStatus::Optimal);
    CHECK(again.report.objective_eur ==
          doctest::Approx(direct.report.objective_eur).epsilon(1e-9));
    // names fall back to the mangled on-disk ones
    CHECK(back.var(0).name[0] == 'C');
    std::remove("t_nosidecar.mps");
}
