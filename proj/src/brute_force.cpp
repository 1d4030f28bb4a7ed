#include "eamod/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "eamod/errors.hpp"

namespace eamod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense two-phase tableau simplex for the per-chain residual problem:
// min c.z subject to rows A z {<,=,>} b with z >= 0.  A few dozen rows and
// columns at most, Bland's rule throughout.  Kept deliberately independent of
// the revised simplex used by the main solver so the two can cross-check.
class TinyLp {
public:
    int add_var() { return n_++; }

    void add_row(std::vector<double> a, char sense, double b) {
        a.resize(static_cast<std::size_t>(n_), 0.0);
        if (b < 0.0) {
            for (double& v : a) v = -v;
            b = -b;
            sense = (sense == '<') ? '>' : (sense == '>') ? '<' : '=';
        }
        rows_.push_back(std::move(a));
        rhs_.push_back(b);
        sense_.push_back(sense);
    }

    bool solve(const std::vector<double>& c, double& objective, std::vector<double>& z) {
        const int m = static_cast<int>(rows_.size());
        int cols = n_;
        std::vector<int> slack_col(m, -1), art_col(m, -1);
        for (int r = 0; r < m; ++r) {
            if (sense_[r] == '<' || sense_[r] == '>') slack_col[r] = cols++;
        }
        const int first_art = cols;
        for (int r = 0; r < m; ++r) {
            if (sense_[r] == '=' || sense_[r] == '>') art_col[r] = cols++;
        }

        std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
        std::vector<int> basis(m, -1);
        for (int r = 0; r < m; ++r) {
            for (int j = 0; j < n_; ++j) t[r][j] = rows_[r][j];
            if (slack_col[r] >= 0) t[r][slack_col[r]] = (sense_[r] == '<') ? 1.0 : -1.0;
            if (art_col[r] >= 0) t[r][art_col[r]] = 1.0;
            t[r][cols] = rhs_[r];
            basis[r] = (art_col[r] >= 0) ? art_col[r] : slack_col[r];
        }

        std::vector<bool> dead(cols, false);
        auto run = [&](const std::vector<double>& cost) -> bool {
            for (long iter = 0; iter < 100000; ++iter) {
                int q = -1;
                for (int j = 0; j < cols && q < 0; ++j) {
                    if (dead[j]) continue;
                    double red = cost[j];
                    for (int r = 0; r < m; ++r)
                        if (basis[r] >= 0) red -= cost[basis[r]] * t[r][j];
                    if (red < -1e-9) q = j;
                }
                if (q < 0) return true;
                int pr = -1;
                double best = kInf;
                for (int r = 0; r < m; ++r) {
                    if (t[r][q] <= 1e-11) continue;
                    const double ratio = t[r][cols] / t[r][q];
                    if (ratio < best - 1e-12 ||
                        (ratio < best + 1e-12 && pr >= 0 && basis[r] < basis[pr])) {
                        best = ratio;
                        pr = r;
                    }
                }
                if (pr < 0) return false;  // unbounded; cannot happen here
                const double inv = 1.0 / t[pr][q];
                for (double& v : t[pr]) v *= inv;
                for (int r = 0; r < m; ++r) {
                    if (r == pr || t[r][q] == 0.0) continue;
                    const double f = t[r][q];
                    for (int j = 0; j <= cols; ++j) t[r][j] -= f * t[pr][j];
                }
                basis[pr] = q;
            }
            throw NumericalFailure("brute_force: tableau simplex did not terminate");
        };

        if (first_art < cols) {
            std::vector<double> c1(cols, 0.0);
            for (int j = first_art; j < cols; ++j) c1[j] = 1.0;
            if (!run(c1)) throw NumericalFailure("brute_force: unbounded feasibility phase");
            double art_mass = 0.0;
            for (int r = 0; r < m; ++r)
                if (basis[r] >= first_art) art_mass += t[r][cols];
            if (art_mass > 1e-7) return false;
            // Pivot leftover zero-valued artificials out of the basis.
            for (int r = 0; r < m; ++r) {
                if (basis[r] < first_art) continue;
                int q = -1;
                for (int j = 0; j < first_art && q < 0; ++j)
                    if (std::fabs(t[r][j]) > 1e-9) q = j;
                if (q < 0) {
                    basis[r] = -1;  // redundant row
                    continue;
                }
                const double inv = 1.0 / t[r][q];
                for (double& v : t[r]) v *= inv;
                for (int r2 = 0; r2 < m; ++r2) {
                    if (r2 == r || t[r2][q] == 0.0) continue;
                    const double f = t[r2][q];
                    for (int j = 0; j <= cols; ++j) t[r2][j] -= f * t[r][j];
                }
                basis[r] = q;
            }
            for (int j = first_art; j < cols; ++j) dead[j] = true;
        }

        std::vector<double> c2(cols, 0.0);
        for (int j = 0; j < n_; ++j) c2[j] = c[j];
        if (!run(c2)) throw NumericalFailure("brute_force: residual problem unbounded");

        z.assign(static_cast<std::size_t>(n_), 0.0);
        for (int r = 0; r < m; ++r)
            if (basis[r] >= 0 && basis[r] < n_) z[basis[r]] = t[r][cols];
        objective = 0.0;
        for (int j = 0; j < n_; ++j) objective += c[j] * z[j];
        return true;
    }

private:
    int n_ = 0;
    std::vector<std::vector<double>> rows_;
    std::vector<double> rhs_;
    std::vector<char> sense_;
};

struct Option {
    int station = -1;       // -1: pass through without charging
    double detour_km = 0.0;
    double cap_kwh = 0.0;
};

struct ChainEval {
    double cost = kInf;     // vehicle amortization + energy - revenue
    double battery_kwh = 0.0;
    std::vector<int> seq;           // extended indices, depot to depot
    std::vector<int> choice;        // station per arc, -1 = none
    std::vector<double> charge;     // kWh per arc
};

// Optimal cost of serving exactly the given chain with one vehicle, optimizing
// battery size, station choices and charge amounts.
ChainEval eval_chain(const TransitionDag& dag, const EconomicParams& econ,
                     const std::vector<int>& seq) {
    ChainEval best;
    best.seq = seq;
    const int arcs = static_cast<int>(seq.size()) - 1;

    std::vector<std::vector<Option>> options(arcs);
    std::vector<double> base_km(arcs, 0.0);
    double revenue = 0.0;
    for (int a = 0; a < arcs; ++a) {
        const int tail = seq[a], head = seq[a + 1];
        const PairBound& pb = dag.bounds.at(tail, head);
        if (!pb.x_ub) return best;  // chain not drivable in time
        base_km[a] = pb.d_fp_km + dag.extended.service_distance(head);
        revenue += dag.extended.price(head);
        std::vector<Option> opts{Option{}};
        for (std::size_t c = 0; c < pb.stations.size(); ++c) {
            const StationBound& sb = pb.stations[c];
            if (!sb.s_ub) continue;
            opts.push_back(Option{static_cast<int>(c), sb.detour_dist_km, sb.c_ub_kwh});
        }
        // Drop options beaten on both detour and capacity.
        std::vector<Option> kept;
        for (std::size_t u = 0; u < opts.size(); ++u) {
            bool dominated = false;
            for (std::size_t v = 0; v < opts.size() && !dominated; ++v) {
                if (v == u) continue;
                const bool no_worse =
                    opts[v].detour_km <= opts[u].detour_km && opts[v].cap_kwh >= opts[u].cap_kwh;
                const bool strictly =
                    opts[v].detour_km < opts[u].detour_km || opts[v].cap_kwh > opts[u].cap_kwh;
                if (no_worse && (strictly || v < u)) dominated = true;
            }
            if (!dominated) kept.push_back(opts[u]);
        }
        options[a] = std::move(kept);
    }

    std::vector<std::size_t> pick(arcs, 0);
    while (true) {
        // Residual continuous problem: z = (E_b, C_a for arcs with a station).
        TinyLp lp;
        const int v_eb = lp.add_var();
        std::vector<int> v_c(arcs, -1);
        std::vector<double> dist(arcs, 0.0);
        for (int a = 0; a < arcs; ++a) {
            const Option& o = options[a][pick[a]];
            dist[a] = base_km[a] + o.detour_km;
            if (o.station >= 0) v_c[a] = lp.add_var();
        }
        const int nv = 1 + static_cast<int>(std::count_if(v_c.begin(), v_c.end(),
                                                          [](int v) { return v >= 0; }));
        auto row = [&](int upto) {
            // Coefficients of e_upto = e_b0 - cum*(de0 + deb*E_b) + sum C.
            std::vector<double> a(static_cast<std::size_t>(nv), 0.0);
            double cum = 0.0;
            for (int s = 0; s <= upto; ++s) {
                cum += dist[s];
                if (v_c[s] >= 0) a[v_c[s]] = 1.0;
            }
            a[v_eb] = -cum * econ.delta_eb_per_km;
            return std::pair<std::vector<double>, double>(std::move(a),
                                                          cum * econ.delta_e0_kwh_per_km);
        };
        for (int a = 0; a < arcs - 1; ++a) {
            auto [coeff, cum_e0] = row(a);
            lp.add_row(coeff, '>', cum_e0 - econ.e_b0_kwh);           // soc stays nonnegative
            std::vector<double> ub = coeff;
            ub[v_eb] -= 1.0;
            lp.add_row(ub, '<', cum_e0 - econ.e_b0_kwh);              // soc below battery size
        }
        {
            auto [coeff, cum_e0] = row(arcs - 1);
            lp.add_row(coeff, '=', cum_e0);                           // end the day full again
        }
        {
            std::vector<double> a(static_cast<std::size_t>(nv), 0.0);
            a[v_eb] = 1.0;
            lp.add_row(a, '>', econ.e_b0_kwh);
            std::vector<double> b(static_cast<std::size_t>(nv), 0.0);
            b[v_eb] = 1.0;
            lp.add_row(b, '<', econ.e_b_max_kwh);
        }
        for (int a = 0; a < arcs; ++a) {
            if (v_c[a] < 0) continue;
            std::vector<double> coeff(static_cast<std::size_t>(nv), 0.0);
            coeff[v_c[a]] = 1.0;
            lp.add_row(coeff, '<', options[a][pick[a]].cap_kwh);
        }

        std::vector<double> c(static_cast<std::size_t>(nv), 0.0);
        c[v_eb] = econ.p_b_eur_per_kwh / econ.tau_v_days;
        for (int a = 0; a < arcs; ++a)
            if (v_c[a] >= 0) c[v_c[a]] = econ.p_el_eur_per_kwh;

        double obj = 0.0;
        std::vector<double> z;
        if (lp.solve(c, obj, z)) {
            const double cost = econ.p_v_eur / econ.tau_v_days + obj - revenue;
            if (cost < best.cost - 1e-12) {
                best.cost = cost;
                best.battery_kwh = z[v_eb];
                best.choice.assign(arcs, -1);
                best.charge.assign(arcs, 0.0);
                for (int a = 0; a < arcs; ++a) {
                    best.choice[a] = options[a][pick[a]].station;
                    if (v_c[a] >= 0) best.charge[a] = z[v_c[a]];
                }
            }
        }

        int a = arcs - 1;
        while (a >= 0 && ++pick[a] == options[a].size()) pick[a--] = 0;
        if (a < 0) break;
    }
    return best;
}

VehiclePlan plan_from_chain(const TransitionDag& dag, const EconomicParams& econ,
                            const ChainEval& ev) {
    VehiclePlan plan;
    plan.used = true;
    plan.battery_kwh = ev.battery_kwh;
    plan.schedule = ev.seq;
    plan.energy_at.assign(dag.extended.size(), 0.0);
    const double per_km = consumption_per_km(ev.battery_kwh, econ);
    double soc = econ.e_b0_kwh;
    plan.energy_at[ev.seq.front()] = soc;
    for (std::size_t a = 0; a + 1 < ev.seq.size(); ++a) {
        const int tail = ev.seq[a], head = ev.seq[a + 1];
        const PairBound& pb = dag.bounds.at(tail, head);
        double km = pb.d_fp_km + dag.extended.service_distance(head);
        if (ev.choice[a] >= 0) {
            km += pb.stations[static_cast<std::size_t>(ev.choice[a])].detour_dist_km;
            ChargeEvent ce;
            ce.after = tail;
            ce.before = head;
            ce.station = ev.choice[a];
            ce.energy_kwh = ev.charge[a];
            plan.charge_events.push_back(ce);
        }
        soc += -per_km * km + ev.charge[a];
        plan.energy_at[head] = soc;
    }
    return plan;
}

}  // namespace

FleetSolution brute_force(const TransitionDag& dag, int k_max, const EconomicParams& econ,
                          const BruteForceLimits& limits) {
    econ.validate();
    const int I = static_cast<int>(dag.extended.requests.size());
    if (I > limits.max_requests)
        throw InstanceTooLarge("brute_force: " + std::to_string(I) + " requests exceed the limit of " +
                               std::to_string(limits.max_requests));
    if (k_max < 1 || k_max > limits.max_vehicles)
        throw InstanceTooLarge("brute_force: fleet of " + std::to_string(k_max) +
                               " exceeds the limit of " + std::to_string(limits.max_vehicles));

    const int last = dag.extended.end_index();
    const unsigned masks = 1u << I;
    std::vector<ChainEval> memo(masks);
    memo[0].cost = 0.0;
    for (unsigned mask = 1; mask < masks; ++mask) {
        std::vector<int> seq{0};
        for (int b = 0; b < I; ++b)
            if (mask & (1u << b)) seq.push_back(b + 1);  // ascending = chronological
        seq.push_back(last);
        memo[mask] = eval_chain(dag, econ, seq);
    }

    double best = 0.0;
    unsigned best_m1 = 0, best_m2 = 0;
    const unsigned full = masks - 1;
    for (unsigned m1 = 0; m1 < masks; ++m1) {
        if (memo[m1].cost == kInf) continue;
        if (k_max == 1) {
            if (memo[m1].cost < best - 1e-12) {
                best = memo[m1].cost;
                best_m1 = m1;
            }
            continue;
        }
        const unsigned rest = full & ~m1;
        for (unsigned m2 = rest;; m2 = (m2 - 1) & rest) {  // all submasks incl. 0
            if (m2 <= m1 && memo[m2].cost != kInf) {
                const double cost = memo[m1].cost + memo[m2].cost;
                if (cost < best - 1e-12) {
                    best = cost;
                    best_m1 = m1;
                    best_m2 = m2;
                }
            }
            if (m2 == 0) break;
        }
    }

    FleetSolution sol;
    sol.status = SolveStatus::Optimal;
    sol.objective_eur = best;
    sol.served.assign(dag.extended.size(), 0);
    for (const unsigned mask : {best_m1, best_m2}) {
        if (mask == 0) continue;
        for (int b = 0; b < I; ++b)
            if (mask & (1u << b)) sol.served[b + 1] = 1;
    }
    if (best_m1 != 0) sol.vehicles.push_back(plan_from_chain(dag, econ, memo[best_m1]));
    if (k_max >= 2 && best_m2 != 0) sol.vehicles.push_back(plan_from_chain(dag, econ, memo[best_m2]));
    while (static_cast<int>(sol.vehicles.size()) < k_max) {
        VehiclePlan idle;
        idle.schedule = {0, last};
        idle.energy_at.assign(dag.extended.size(), 0.0);
        sol.vehicles.push_back(std::move(idle));
    }
    return sol;
}

}  // namespace eamod
