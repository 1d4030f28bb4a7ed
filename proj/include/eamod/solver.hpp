#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "eamod/milp_core.hpp"
#include "eamod/transition_graph.hpp"

namespace eamod {

struct SolveOptions {
    double time_limit_s = 900.0;
    double abs_gap = 1e-7;   // stop once incumbent - bound falls below this
    double rel_gap = 0.0;
    long node_limit = 5'000'000;
    std::uint64_t seed = 0;  // reserved; the search itself is deterministic
};

struct SolveReport {
    SolveStatus status = SolveStatus::Infeasible;
    double objective_eur = 0.0;
    double bound_eur = 0.0;  // proven lower bound on the objective
    double gap_eur = 0.0;    // objective - bound at termination
    long nodes_explored = 0;
    long lp_iterations = 0;
    double wall_time_s = 0.0;
};

struct MilpResult {
    SolveReport report;
    std::vector<double> x;   // incumbent values, binaries snapped; empty if none
};

/// Branch and bound over the simplex relaxation: best-bound node order,
/// most-fractional branching (lowest index on ties), up-branch explored first,
/// warm-started LP re-solves via bound overrides. Deterministic.
MilpResult solve_milp(const MilpModel& model, const SolveOptions& opts = {});

/// True iff the model carries fleet variable keys (built by assemble_model,
/// as opposed to one read back from an interchange file).
bool has_fleet_keys(const MilpModel& model);

/// Decodes raw variable values into per-vehicle plans. Requires fleet keys.
FleetSolution extract_fleet_solution(const MilpModel& model, const TransitionDag& dag,
                                     const std::vector<double>& x, SolveStatus status,
                                     double objective_eur, double gap_eur);

std::pair<FleetSolution, SolveReport> solve_fleet(const MilpModel& model, const TransitionDag& dag,
                                                  const SolveOptions& opts = {});

}  // namespace eamod
