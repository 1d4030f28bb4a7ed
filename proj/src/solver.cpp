#include "eamod/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <queue>

#include "eamod/errors.hpp"
#include "eamod/lp.hpp"

namespace eamod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Branch until binaries sit exactly on a bound; incumbents are then vertices
// of binary-fixed relaxations and survive snapping without residual error.
constexpr double kIntTol = 1e-9;

struct Node {
    long parent = -1;
    int var = -1;       // branched variable; -1 for the root
    double lo = 0.0, hi = 0.0;
    double bound = -kInf;
};

// min-heap over (bound, id); the id tie-break makes the node created first
// pop before its sibling.
using HeapEntry = std::pair<double, long>;

// Fleet decisions ordered by how much of the model each one switches: usage
// flags gate whole vehicle blocks, served flags gate assignment rows, then
// transitions, then station picks.  Branching settles the heavy gates first.
int branch_class(VarKey::Type t) {
    switch (t) {
        case VarKey::Type::VehicleUsed: return 0;
        case VarKey::Type::RequestServed: return 1;
        case VarKey::Type::Transition: return 2;
        case VarKey::Type::ChargeStop: return 3;
        default: return 4;
    }
}

}  // namespace

MilpResult solve_milp(const MilpModel& model, const SolveOptions& opts) {
    SimplexLp lp(model);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::vector<Node> arena;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
    std::vector<long> dive;  // plunge stack: depth-first until the dive dies
    arena.push_back(Node{});
    dive.push_back(0);

    double best = kInf;
    std::vector<double> incumbent;
    double stop_bound = kInf;  // best bound among discarded-unexplored subtrees
    bool hit_limit = false;
    long nodes = 0;
    std::vector<int> touched;

    while (true) {
        const double cutoff = best - opts.abs_gap - opts.rel_gap * std::fabs(best);
        long id;
        double bnd;
        if (!dive.empty()) {
            // Finish the current dive first: consecutive LPs differ by one
            // bound, so the dual warm start needs only a few pivots, and
            // integral leaves surface early.
            id = dive.back();
            dive.pop_back();
            bnd = arena[id].bound;
            if (!incumbent.empty() && bnd >= cutoff) {
                stop_bound = std::min(stop_bound, bnd);
                continue;
            }
        } else if (!heap.empty()) {
            std::tie(bnd, id) = heap.top();
            heap.pop();
            if (!incumbent.empty() && bnd >= cutoff) {
                stop_bound = std::min(stop_bound, bnd);
                break;  // best-bound order: nothing better remains
            }
        } else {
            break;
        }
        if (elapsed() > opts.time_limit_s || nodes >= opts.node_limit) {
            hit_limit = true;
            stop_bound = std::min(stop_bound, bnd);
            break;
        }

        // Replay the branching decisions along the path to the root; applying
        // root-to-leaf lets deeper (tighter) overrides win.
        touched.clear();
        std::vector<long> path;
        for (long a = id; a >= 0; a = arena[a].parent) path.push_back(a);
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            const Node& n = arena[*it];
            if (n.var < 0) continue;
            lp.set_bounds(n.var, n.lo, n.hi);
            touched.push_back(n.var);
        }

        const LpResult res = lp.solve(incumbent.empty() ? kInf : cutoff);
        for (const int v : touched)
            lp.set_bounds(v, model.var(v).lower, model.var(v).upper);
        ++nodes;

        if (res.status == LpStatus::Infeasible) continue;
        if (res.objective >= cutoff) continue;

        int branch = -1;
        int cls = 5;
        double best_score = kIntTol;
        for (int j = 0; j < model.n_vars(); ++j) {
            if (model.var(j).kind != VarKind::Binary) continue;
            const double v = lp.value(j);
            const double frac = v - std::floor(v);
            const double score = std::min(frac, 1.0 - frac);
            if (score <= kIntTol) continue;
            const int c = branch_class(model.var(j).key.type);
            if (c < cls || (c == cls && score > best_score + 1e-12)) {
                cls = c;
                best_score = score;
                branch = j;
            }
        }
        if (branch < 0) {
            std::vector<double> xi = lp.values();
            double obj = 0.0;
            for (int j = 0; j < model.n_vars(); ++j) {
                if (model.var(j).kind == VarKind::Binary) xi[j] = std::round(xi[j]);
                obj += model.var(j).objective * xi[j];
            }
            if (obj < best - 1e-12) {
                best = obj;
                incumbent = std::move(xi);
            }
            continue;
        }
        // Dive toward the nearest integer of the fractional value; the
        // sibling waits in the best-bound heap.
        Node up{id, branch, 1.0, 1.0, res.objective};
        Node dn{id, branch, 0.0, 0.0, res.objective};
        const Node& first = (lp.value(branch) >= 0.5) ? dn : up;
        const Node& second = (lp.value(branch) >= 0.5) ? up : dn;
        arena.push_back(first);
        heap.emplace(res.objective, static_cast<long>(arena.size()) - 1);
        arena.push_back(second);
        dive.push_back(static_cast<long>(arena.size()) - 1);
    }

    if (std::getenv("EAMOD_LP_STATS") != nullptr) {
        const LpStats& st = lp.stats();
        std::fprintf(stderr,
                     "lp stats: dual %ld primal %ld giveups %ld primal_runs %ld refactors %ld "
                     "nodes %ld\n",
                     st.dual_pivots, st.primal_pivots, st.dual_giveups, st.primal_runs,
                     st.refactors, nodes);
    }

    MilpResult out;
    out.report.nodes_explored = nodes;
    out.report.lp_iterations = lp.total_iterations();
    out.report.wall_time_s = elapsed();
    if (hit_limit) {  // remaining open nodes cap what the search proved
        for (const long sid : dive) stop_bound = std::min(stop_bound, arena[sid].bound);
        if (!heap.empty()) stop_bound = std::min(stop_bound, heap.top().first);
    }
    const bool exhausted = heap.empty() && dive.empty() && !hit_limit && !std::isfinite(stop_bound);
    if (incumbent.empty()) {
        out.report.status = hit_limit ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
        out.report.objective_eur = kInf;
        out.report.bound_eur = hit_limit ? stop_bound : kInf;
        out.report.gap_eur = hit_limit ? kInf : 0.0;
        return out;
    }
    out.x = std::move(incumbent);  // binaries already snapped at acceptance
    out.report.objective_eur = best;
    out.report.bound_eur = exhausted ? best : std::min(stop_bound, best);
    out.report.gap_eur = best - out.report.bound_eur;
    out.report.status = hit_limit ? SolveStatus::Feasible : SolveStatus::Optimal;
    return out;
}

bool has_fleet_keys(const MilpModel& model) {
    return model.var_by_key({VarKey::Type::VehicleUsed, -1, -1, 0, -1}) >= 0;
}

FleetSolution extract_fleet_solution(const MilpModel& model, const TransitionDag& dag,
                                     const std::vector<double>& x, SolveStatus status,
                                     double objective_eur, double gap_eur) {
    if (!has_fleet_keys(model))
        throw InvalidDimension("extract_fleet_solution: model has no fleet variable keys");
    if (static_cast<int>(x.size()) != model.n_vars())
        throw MismatchedShapes("extract_fleet_solution: value vector size");

    const ExtendedRequestSet& ext = dag.extended;
    const int last = ext.end_index();
    auto val = [&](VarKey key) {
        const int idx = model.var_by_key(key);
        return idx >= 0 ? x[static_cast<std::size_t>(idx)] : 0.0;
    };

    FleetSolution sol;
    sol.status = status;
    sol.objective_eur = objective_eur;
    sol.gap = gap_eur;
    sol.served.assign(ext.size(), 0);
    for (int i = 1; i < last; ++i)
        sol.served[i] = val({VarKey::Type::RequestServed, i, -1, -1, -1}) > 0.5 ? 1 : 0;

    int k_max = 0;
    while (model.var_by_key({VarKey::Type::VehicleUsed, -1, -1, k_max, -1}) >= 0) ++k_max;

    for (int k = 0; k < k_max; ++k) {
        VehiclePlan plan;
        plan.used = val({VarKey::Type::VehicleUsed, -1, -1, k, -1}) > 0.5;
        plan.battery_kwh = val({VarKey::Type::Battery, -1, -1, k, -1});
        plan.energy_at.assign(ext.size(), 0.0);
        if (!plan.used) {
            plan.schedule = {0, last};
            sol.vehicles.push_back(std::move(plan));
            continue;
        }
        plan.schedule.push_back(0);
        int cur = 0;
        while (cur != last) {
            int next = -1;
            for (int j = 1; j <= last; ++j) {
                if (j == cur) continue;
                const int idx = model.var_by_key({VarKey::Type::Transition, cur, j, k, -1});
                if (idx >= 0 && x[static_cast<std::size_t>(idx)] > 0.5) {
                    next = j;
                    break;
                }
            }
            if (next < 0) throw NumericalFailure("extract_fleet_solution: schedule breaks off");
            for (std::size_t c = 0; c < dag.bounds.at(cur, next).stations.size(); ++c) {
                const int sidx =
                    model.var_by_key({VarKey::Type::ChargeStop, cur, next, k, static_cast<int>(c)});
                if (sidx < 0 || x[static_cast<std::size_t>(sidx)] <= 0.5) continue;
                ChargeEvent ev;
                ev.after = cur;
                ev.before = next;
                ev.station = static_cast<int>(c);
                ev.energy_kwh = val({VarKey::Type::ChargeAmount, cur, next, k, static_cast<int>(c)});
                plan.charge_events.push_back(ev);
            }
            plan.schedule.push_back(next);
            if (plan.schedule.size() > ext.size() + 1)
                throw NumericalFailure("extract_fleet_solution: schedule does not terminate");
            cur = next;
        }
        for (const int node : plan.schedule)
            plan.energy_at[static_cast<std::size_t>(node)] = val({VarKey::Type::Soc, node, -1, k, -1});
        sol.vehicles.push_back(std::move(plan));
    }
    return sol;
}

std::pair<FleetSolution, SolveReport> solve_fleet(const MilpModel& model, const TransitionDag& dag,
                                                  const SolveOptions& opts) {
    MilpResult res = solve_milp(model, opts);
    if (res.x.empty()) {
        FleetSolution sol;
        sol.status = res.report.status;
        sol.objective_eur = res.report.objective_eur;
        sol.gap = res.report.gap_eur;
        return {sol, res.report};
    }
    FleetSolution sol = extract_fleet_solution(model, dag, res.x, res.report.status,
                                               res.report.objective_eur, res.report.gap_eur);
    return {sol, res.report};
}

}  // namespace eamod
