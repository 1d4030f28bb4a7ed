#include "eamod/milp_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "eamod/errors.hpp"

namespace eamod {

int MilpModel::add_var(ModelVar v) {
    const int idx = static_cast<int>(vars_.size());
    if (v.key.type != VarKey::Type::None) key_index_.emplace(v.key, idx);
    vars_.push_back(std::move(v));
    return idx;
}

int MilpModel::add_row(ModelRow r) {
    rows_.push_back(std::move(r));
    pending_.emplace_back();
    return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::add_coeff(int row, int var, double value) {
    if (value == 0.0) return;
    pending_[row].push_back({var, value});
}

void MilpModel::finalize() {
    row_start_.assign(rows_.size() + 1, 0);
    std::size_t total = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        auto& es = pending_[r];
        std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) { return a.var < b.var; });
        // merge duplicate variables within a row
        std::size_t w = 0;
        for (std::size_t k = 0; k < es.size(); ++k) {
            if (w > 0 && es[w - 1].var == es[k].var)
                es[w - 1].coeff += es[k].coeff;
            else
                es[w++] = es[k];
        }
        es.resize(w);
        row_start_[r] = total;
        total += w;
    }
    row_start_[rows_.size()] = total;
    entries_.reserve(total);
    for (auto& es : pending_) entries_.insert(entries_.end(), es.begin(), es.end());
    pending_.clear();
    pending_.shrink_to_fit();
    finalized_ = true;
}

int MilpModel::var_by_key(const VarKey& key) const {
    auto it = key_index_.find(key);
    return it == key_index_.end() ? -1 : it->second;
}

void MilpModel::set_var_bounds(int var, double lower, double upper) {
    vars_[var].lower = lower;
    vars_[var].upper = upper;
}

std::map<std::string, std::size_t> MilpModel::rows_per_family() const {
    std::map<std::string, std::size_t> out;
    for (const auto& r : rows_) ++out[r.family];
    return out;
}

namespace {

std::string idx2(const char* base, int a, int b) {
    return std::string(base) + "_" + std::to_string(a) + "_" + std::to_string(b);
}
std::string idx3(const char* base, int a, int b, int c) {
    return idx2(base, a, b) + "_" + std::to_string(c);
}
std::string idx4(const char* base, int a, int b, int c, int d) {
    return idx3(base, a, b, c) + "_" + std::to_string(d);
}

} // namespace

MilpModel assemble_model(const TransitionDag& dag, int k_max, const EconomicParams& econ,
                         const ModelOptions& options) {
    if (k_max < 1) throw InvalidDimension("k_max must be >= 1");
    econ.validate();
    if (options.fixed_battery_kwh && (*options.fixed_battery_kwh <= 0.0 ||
                                      *options.fixed_battery_kwh > econ.e_b_max_kwh))
        throw ConfigError("fixed_battery_kwh", "must be in (0, e_b_max_kwh]");

    const ExtendedRequestSet& ext = dag.extended;
    const TransitionBounds& bounds = dag.bounds;
    const int n = ext.size();
    const int last = ext.end_index();
    const int n_st = bounds.n_stations();
    const double e_max = econ.e_b_max_kwh;
    const double de0 = econ.delta_e0_kwh_per_km;
    const double deb = econ.delta_eb_per_km;

    // A fixed battery makes per-leg consumption a constant, so the
    // transition-energy variable and its envelope rows collapse away.
    const bool fixed_b = options.fixed_battery_kwh.has_value();
    const double e_range = fixed_b ? *options.fixed_battery_kwh : e_max;
    const double de_rng = consumption_per_km(e_range, econ);

    // Feasible pairs and their station options, shared across vehicles.
    struct PairInfo {
        int i, j;
        std::vector<int> stations; // station indices with s_ub
        double big_m = 0.0;
        double e_upper = 0.0; // upper bound of the transition-energy variable
        bool has_e = false;   // pair carries a transition-energy variable
    };
    std::vector<PairInfo> pairs;
    for (int i = 0; i < n; ++i) {
        if (i == last) continue;
        for (int j = 1; j < n; ++j) {
            if (j == i) continue;
            const PairBound& p = bounds.at(i, j);
            if (!p.x_ub) continue;
            PairInfo info;
            info.i = i;
            info.j = j;
            double max_detour_km = 0.0;
            for (int c = 0; c < n_st; ++c) {
                const StationBound& s = p.stations[c];
                if (!s.s_ub) continue;
                info.stations.push_back(c);
                max_detour_km = std::max(max_detour_km, s.detour_dist_km);
            }
            info.has_e = !info.stations.empty() && !fixed_b;
            info.e_upper = info.has_e ? de_rng * (p.d_fp_km + max_detour_km) : 0.0;
            // With the transition off, stop and charge variables are already
            // zero, so M only has to cover the SoC span plus whatever leg the
            // balance row itself carries.
            const double d_eb =
                ext.service_distance(j) + (info.has_e ? 0.0 : p.d_fp_km);
            info.big_m = e_range * (1.0 + deb * d_eb) + de0 * d_eb + info.e_upper;
            pairs.push_back(info);
        }
    }

    MilpModel model;
    double big_m_energy = 0.0;
    for (const auto& pi : pairs) big_m_energy = std::max(big_m_energy, pi.big_m);
    model.set_big_m_energy(big_m_energy);

    // fleet-wide served flags
    std::vector<int> v_br(n, -1);
    for (int i = 1; i < last; ++i)
        v_br[i] = model.add_var({"br_" + std::to_string(i), VarKind::Binary, 0.0, 1.0,
                                 -ext.price(i), {VarKey::Type::RequestServed, i, -1, -1, -1}});

    // per-vehicle variables
    struct VehicleVars {
        int bv = -1, eb = -1;
        std::vector<int> soc;           // by extended index
        std::vector<int> x;             // by pair position
        std::vector<int> e;             // by pair position; -1 when substituted
        std::vector<std::vector<int>> s; // by pair position, then station option
        std::vector<std::vector<int>> c;
    };
    std::vector<VehicleVars> veh(k_max);
    for (int k = 0; k < k_max; ++k) {
        VehicleVars& vv = veh[k];
        vv.bv = model.add_var({"bv_" + std::to_string(k), VarKind::Binary, 0.0, 1.0,
                               econ.p_v_eur / econ.tau_v_days,
                               {VarKey::Type::VehicleUsed, -1, -1, k, -1}});
        vv.eb = model.add_var({"Eb_" + std::to_string(k), VarKind::Continuous, 0.0, e_range,
                               econ.p_b_eur_per_kwh / econ.tau_v_days,
                               {VarKey::Type::Battery, -1, -1, k, -1}});
        vv.soc.resize(n);
        for (int i = 0; i < n; ++i)
            vv.soc[i] = model.add_var({idx2("e", i, k), VarKind::Continuous, 0.0, e_range, 0.0,
                                       {VarKey::Type::Soc, i, -1, k, -1}});
        vv.x.resize(pairs.size());
        vv.e.assign(pairs.size(), -1);
        vv.s.resize(pairs.size());
        vv.c.resize(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const PairInfo& pi = pairs[p];
            // identical vehicles are interchangeable: restricting vehicle k to
            // start at request index >= k+1 keeps one relabeling of every fleet
            const bool sym_block = pi.i == 0 && pi.j != last && pi.j <= k;
            vv.x[p] = model.add_var({idx3("X", pi.i, pi.j, k), VarKind::Binary, 0.0,
                                     sym_block ? 0.0 : 1.0, 0.0,
                                     {VarKey::Type::Transition, pi.i, pi.j, k, -1}});
            if (pi.has_e)
                vv.e[p] = model.add_var({idx3("E", pi.i, pi.j, k), VarKind::Continuous, 0.0,
                                         pi.e_upper, 0.0,
                                         {VarKey::Type::TransitionEnergy, pi.i, pi.j, k, -1}});
            for (int c : pi.stations) {
                vv.s[p].push_back(model.add_var({idx4("S", pi.i, pi.j, c, k), VarKind::Binary,
                                                 0.0, 1.0, 0.0,
                                                 {VarKey::Type::ChargeStop, pi.i, pi.j, k, c}}));
                vv.c[p].push_back(model.add_var(
                    {idx4("C", pi.i, pi.j, c, k), VarKind::Continuous, 0.0,
                     bounds.at(pi.i, pi.j).stations[c].c_ub_kwh, econ.p_el_eur_per_kwh,
                     {VarKey::Type::ChargeAmount, pi.i, pi.j, k, c}}));
            }
        }
    }

    // ---- constraints ----
    for (int k = 0; k < k_max; ++k) {
        const VehicleVars& vv = veh[k];

        // schedule continuity with depot source/sink: in(j) - out(j) = l - f
        {
            std::vector<int> rows(n, -1);
            for (int j = 0; j < n; ++j) {
                double rhs = j == 0 ? -1.0 : (j == last ? 1.0 : 0.0);
                rows[j] = model.add_row({idx2("conti", j, k), RowSense::EQ, rhs, "continuity"});
            }
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                model.add_coeff(rows[pairs[p].j], vv.x[p], 1.0);
                model.add_coeff(rows[pairs[p].i], vv.x[p], -1.0);
            }
        }

        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const PairInfo& pi = pairs[p];
            const PairBound& pb = bounds.at(pi.i, pi.j);
            const double d_serve = ext.service_distance(pi.j);
            const double m = pi.big_m;
            // served distance entering the energy balance: when the pair has
            // no transition-energy variable, the transition leg is folded into
            // E_b's coefficient and detours ride on the stop binaries below
            const double d_bal = pi.has_e ? d_serve : d_serve + pb.d_fp_km;

            int r1 = model.add_row({idx3("energy1", pi.i, pi.j, k), RowSense::GE,
                                    -m - de0 * d_bal, "energy_balance"});
            int r2 = model.add_row({idx3("energy2", pi.i, pi.j, k), RowSense::LE,
                                    m - de0 * d_bal, "energy_balance"});
            for (int r : {r1, r2}) {
                model.add_coeff(r, vv.soc[pi.j], 1.0);
                model.add_coeff(r, vv.soc[pi.i], -1.0);
                model.add_coeff(r, vv.eb, deb * d_bal);
                if (pi.has_e) model.add_coeff(r, vv.e[p], 1.0);
                if (!pi.has_e)
                    for (std::size_t o = 0; o < pi.stations.size(); ++o)
                        model.add_coeff(r, vv.s[p][o],
                                        de_rng * pb.stations[pi.stations[o]].detour_dist_km);
                for (int cv : vv.c[p]) model.add_coeff(r, cv, -1.0);
            }
            model.add_coeff(r1, vv.x[p], -m);
            model.add_coeff(r2, vv.x[p], m);

            if (pi.stations.empty()) continue;

            if (pi.has_e) {
                // transition-energy envelope rows tie E to the chosen detour
                int t1 = model.add_row({idx3("trans1", pi.i, pi.j, k), RowSense::GE,
                                        de0 * pb.d_fp_km, "transition_energy"});
                model.add_coeff(t1, vv.e[p], 1.0);
                model.add_coeff(t1, vv.eb, -deb * pb.d_fp_km);
                int t2 = model.add_row({idx3("trans2", pi.i, pi.j, k), RowSense::LE,
                                        de0 * pb.d_fp_km, "transition_energy"});
                model.add_coeff(t2, vv.e[p], 1.0);
                model.add_coeff(t2, vv.eb, -deb * pb.d_fp_km);
                for (int sv : vv.s[p]) model.add_coeff(t2, sv, -m);
            }

            int sox = model.add_row({idx3("charge_stop", pi.i, pi.j, k), RowSense::LE, 0.0,
                                     "charge_requires_transition"});
            for (int sv : vv.s[p]) model.add_coeff(sox, sv, 1.0);
            model.add_coeff(sox, vv.x[p], -1.0);

            for (std::size_t o = 0; o < pi.stations.size(); ++o) {
                const int c = pi.stations[o];
                const StationBound& sb = pb.stations[c];
                const double d_det = pb.d_fp_km + sb.detour_dist_km;

                int cap = model.add_row({idx4("charge_cap", pi.i, pi.j, c, k), RowSense::LE, 0.0,
                                         "charge_cap"});
                model.add_coeff(cap, vv.c[p][o], 1.0);
                model.add_coeff(cap, vv.s[p][o], -sb.c_ub_kwh);

                if (!pi.has_e) continue;
                int t3 = model.add_row({idx4("trans3", pi.i, pi.j, c, k), RowSense::GE,
                                        de0 * d_det - m, "transition_energy"});
                model.add_coeff(t3, vv.e[p], 1.0);
                model.add_coeff(t3, vv.eb, -deb * d_det);
                model.add_coeff(t3, vv.s[p][o], -m);
                int t4 = model.add_row({idx4("trans4", pi.i, pi.j, c, k), RowSense::LE,
                                        de0 * d_det + m, "transition_energy"});
                model.add_coeff(t4, vv.e[p], 1.0);
                model.add_coeff(t4, vv.eb, -deb * d_det);
                model.add_coeff(t4, vv.s[p][o], m);
            }
        }

        // battery caps state of charge at every stop
        for (int i = 0; i < n; ++i) {
            int r = model.add_row({idx2("soc_cap", i, k), RowSense::LE, 0.0, "soc_bounds"});
            model.add_coeff(r, vv.soc[i], 1.0);
            model.add_coeff(r, vv.eb, -1.0);
        }

        // unused vehicles idle at the depot with an empty battery; the
        // per-pair linking keeps the relaxation from buying fractional vehicles
        {
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                if (pairs[p].i == 0 && pairs[p].j == last) {
                    int home = model.add_row({"home_" + std::to_string(k), RowSense::GE, 1.0,
                                              "vehicle_usage"});
                    model.add_coeff(home, vv.x[p], 1.0);
                    model.add_coeff(home, vv.bv, 1.0);
                } else {
                    int act = model.add_row({idx3("usage", pairs[p].i, pairs[p].j, k),
                                             RowSense::LE, 0.0, "vehicle_usage"});
                    model.add_coeff(act, vv.x[p], 1.0);
                    model.add_coeff(act, vv.bv, -1.0);
                }
            }

            int bat = model.add_row({"battery_link_" + std::to_string(k), RowSense::LE, 0.0,
                                     "battery_limit"});
            model.add_coeff(bat, vv.eb, 1.0);
            model.add_coeff(bat, vv.bv, -e_max);
        }

        // boundary state of charge and battery consistency
        for (int node : {0, last}) {
            int r = model.add_row({idx2("boundary", node, k), RowSense::EQ, 0.0,
                                   "boundary_energy"});
            model.add_coeff(r, vv.soc[node], 1.0);
            model.add_coeff(r, vv.bv, -econ.e_b0_kwh);
        }
        {
            int r = model.add_row({"battery_fits_" + std::to_string(k), RowSense::GE, 0.0,
                                   "boundary_energy"});
            model.add_coeff(r, vv.eb, 1.0);
            model.add_coeff(r, vv.bv, -econ.e_b0_kwh);
        }

        if (options.fixed_battery_kwh) {
            int r = model.add_row({"fixed_battery_" + std::to_string(k), RowSense::EQ, 0.0,
                                   "fixed_battery"});
            model.add_coeff(r, vv.eb, 1.0);
            model.add_coeff(r, vv.bv, -*options.fixed_battery_kwh);
        } else if (options.homogeneous && k > 0) {
            // conditional equality E_b^k = E_b^0 when vehicle k is used
            int r1 = model.add_row({"uniform1_" + std::to_string(k), RowSense::LE, e_max,
                                    "uniform_battery"});
            model.add_coeff(r1, vv.eb, 1.0);
            model.add_coeff(r1, veh[0].eb, -1.0);
            model.add_coeff(r1, vv.bv, e_max);
            int r2 = model.add_row({"uniform2_" + std::to_string(k), RowSense::LE, e_max,
                                    "uniform_battery"});
            model.add_coeff(r2, veh[0].eb, 1.0);
            model.add_coeff(r2, vv.eb, -1.0);
            model.add_coeff(r2, vv.bv, e_max);
        }

        if (k + 1 < k_max) {
            int r = model.add_row({"fleet_order_" + std::to_string(k), RowSense::LE, 0.0,
                                   "fleet_order"});
            model.add_coeff(r, veh[k + 1].bv, 1.0);
            model.add_coeff(r, vv.bv, -1.0);
        }
    }

    // fleet-wide: serve each request at most once, from either side
    for (int j = 1; j < last; ++j) {
        int rin = model.add_row({"serve_in_" + std::to_string(j), RowSense::LE, 1.0,
                                 "serve_once"});
        int rout = model.add_row({"serve_out_" + std::to_string(j), RowSense::LE, 1.0,
                                  "serve_once"});
        int rlink = model.add_row({"served_link_" + std::to_string(j), RowSense::EQ, 0.0,
                                   "served_link"});
        model.add_coeff(rlink, v_br[j], 1.0);
        for (int k = 0; k < k_max; ++k)
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                if (pairs[p].j == j) {
                    model.add_coeff(rin, veh[k].x[p], 1.0);
                    model.add_coeff(rlink, veh[k].x[p], -1.0);
                }
                if (pairs[p].i == j) model.add_coeff(rout, veh[k].x[p], 1.0);
            }
    }

    if (options.min_served) {
        int r = model.add_row({"service_quota", RowSense::GE,
                               static_cast<double>(*options.min_served), "service_quota"});
        for (int i = 1; i < last; ++i) model.add_coeff(r, v_br[i], 1.0);
    }

    model.finalize();
    return model;
}

void write_model_summary(const MilpModel& model, const std::string& path) {
    nlohmann::json j;
    j["n_vars"] = model.n_vars();
    j["n_rows"] = model.n_rows();
    j["big_m_energy"] = model.big_m_energy();
    std::size_t binaries = 0;
    for (const auto& v : model.vars()) binaries += v.kind == VarKind::Binary ? 1 : 0;
    j["n_binary"] = binaries;
    j["rows_per_family"] = model.rows_per_family();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// solution verification

namespace {

struct Checker {
    const TransitionDag& dag;
    const EconomicParams& econ;
    const ModelOptions& options;
    const FleetSolution& sol;
    double tol;
    std::vector<Violation> out;

    void flag(std::string family, int k, int i, int j, int c, double residual,
              std::string detail) {
        out.push_back({std::move(family), k, i, j, c, residual, std::move(detail)});
    }

    void run() {
        const ExtendedRequestSet& ext = dag.extended;
        const int last = ext.end_index();
        std::vector<int> serve_count(ext.size(), 0);

        for (int k = 0; k < static_cast<int>(sol.vehicles.size()); ++k) {
            const VehiclePlan& v = sol.vehicles[k];
            check_vehicle(k, v, serve_count);
            if (!v.used && !v.charge_events.empty())
                flag("vehicle_usage", k, -1, -1, -1, static_cast<double>(v.charge_events.size()),
                     "unused vehicle has charge events");
            if (!v.used && v.battery_kwh > tol)
                flag("battery_limit", k, -1, -1, -1, v.battery_kwh,
                     "unused vehicle carries a battery");
            if (v.battery_kwh > econ.e_b_max_kwh + tol)
                flag("battery_limit", k, -1, -1, -1, v.battery_kwh - econ.e_b_max_kwh,
                     "battery exceeds fleet cap");
        }

        for (int i = 1; i < last; ++i) {
            if (serve_count[i] > 1)
                flag("serve_once", -1, i, -1, -1, serve_count[i] - 1.0,
                     "request appears in multiple schedules");
            const bool served = i < static_cast<int>(sol.served.size()) && sol.served[i];
            if (served != (serve_count[i] >= 1))
                flag("served_link", -1, i, -1, -1, 0.0,
                     "served flag disagrees with the schedules");
        }

        for (std::size_t k = 1; k < sol.vehicles.size(); ++k)
            if (sol.vehicles[k].used && !sol.vehicles[k - 1].used)
                flag("fleet_order", static_cast<int>(k), -1, -1, -1, 1.0,
                     "vehicle used while an earlier one is idle");

        if (options.fixed_battery_kwh) {
            for (int k = 0; k < static_cast<int>(sol.vehicles.size()); ++k) {
                const VehiclePlan& v = sol.vehicles[k];
                const double want = v.used ? *options.fixed_battery_kwh : 0.0;
                if (std::abs(v.battery_kwh - want) > tol)
                    flag("fixed_battery", k, -1, -1, -1, v.battery_kwh - want,
                         "battery differs from the fixed size");
            }
        } else if (options.homogeneous) {
            double ref = -1.0;
            for (int k = 0; k < static_cast<int>(sol.vehicles.size()); ++k) {
                if (!sol.vehicles[k].used) continue;
                if (ref < 0.0)
                    ref = sol.vehicles[k].battery_kwh;
                else if (std::abs(sol.vehicles[k].battery_kwh - ref) > tol)
                    flag("uniform_battery", k, -1, -1, -1, sol.vehicles[k].battery_kwh - ref,
                         "used vehicles carry different battery sizes");
            }
        }

        if (options.min_served) {
            int total = 0;
            for (int i = 1; i < last; ++i) total += serve_count[i] >= 1 ? 1 : 0;
            if (total < *options.min_served)
                flag("service_quota", -1, -1, -1, -1,
                     static_cast<double>(*options.min_served - total),
                     "served fewer requests than the quota");
        }
    }

    void check_vehicle(int k, const VehiclePlan& v, std::vector<int>& serve_count) {
        const ExtendedRequestSet& ext = dag.extended;
        const TransitionBounds& b = dag.bounds;
        const int last = ext.end_index();

        std::vector<int> sched = v.schedule;
        if (sched.empty()) sched = {0, last}; // idle vehicle's implicit depot stay
        if (sched.front() != 0 || sched.back() != last) {
            flag("continuity", k, sched.front(), sched.back(), -1, 0.0,
                 "schedule does not run depot to depot");
            return;
        }
        for (int idx : sched)
            if (idx < 0 || idx >= ext.size()) {
                flag("continuity", k, idx, -1, -1, 0.0, "schedule index out of range");
                return;
            }
        if (!v.used && (sched.size() != 2 || !v.charge_events.empty())) {
            if (sched.size() != 2)
                flag("vehicle_usage", k, -1, -1, -1, static_cast<double>(sched.size() - 2),
                     "unused vehicle serves requests");
        }

        // transitions must exist in the DAG
        for (std::size_t s = 0; s + 1 < sched.size(); ++s) {
            const int i = sched[s], j = sched[s + 1];
            if (i == j || (s > 0 && ext.is_depot(i))) {
                flag("continuity", k, i, j, -1, 0.0, "depot revisited mid-schedule");
                return;
            }
            if (!b.at(i, j).x_ub)
                flag("transition_time", k, i, j, -1, 0.0,
                     "transition is not time-feasible");
        }
        for (std::size_t s = 1; s + 1 < sched.size(); ++s) ++serve_count[sched[s]];

        // charge events must sit on a scheduled transition, once per leg
        std::vector<const ChargeEvent*> event_on(sched.size(), nullptr);
        for (const ChargeEvent& ev : v.charge_events) {
            bool placed = false;
            for (std::size_t s = 0; s + 1 < sched.size(); ++s) {
                if (sched[s] != ev.after || sched[s + 1] != ev.before) continue;
                if (event_on[s]) {
                    flag("charge_requires_transition", k, ev.after, ev.before, ev.station, 0.0,
                         "two charge stops on one transition");
                } else {
                    event_on[s] = &ev;
                }
                placed = true;
                break;
            }
            if (!placed) {
                flag("charge_requires_transition", k, ev.after, ev.before, ev.station, 0.0,
                     "charge event off the schedule");
                continue;
            }
            const PairBound& pb = b.at(ev.after, ev.before);
            if (ev.station < 0 || ev.station >= b.n_stations() ||
                pb.stations.empty() || !pb.stations[ev.station].s_ub) {
                flag("charge_cap", k, ev.after, ev.before, ev.station, ev.energy_kwh,
                     "charge stop at an infeasible station");
            } else {
                const double cap = pb.stations[ev.station].c_ub_kwh;
                if (ev.energy_kwh < -tol || ev.energy_kwh > cap + tol)
                    flag("charge_cap", k, ev.after, ev.before, ev.station,
                         ev.energy_kwh - cap, "charged energy outside [0, cap]");
            }
        }

        // replay the energy trajectory
        auto soc = [&](int idx) {
            return idx < static_cast<int>(v.energy_at.size()) ? v.energy_at[idx] : 0.0;
        };
        const double want0 = (v.used ? 1.0 : 0.0) * econ.e_b0_kwh;
        if (std::abs(soc(0) - want0) > tol)
            flag("boundary_energy", k, 0, -1, -1, soc(0) - want0, "start energy off e_b0");
        if (std::abs(soc(last) - want0) > tol)
            flag("boundary_energy", k, last, -1, -1, soc(last) - want0, "end energy off e_b0");
        if (v.used && v.battery_kwh < econ.e_b0_kwh - tol)
            flag("boundary_energy", k, -1, -1, -1, econ.e_b0_kwh - v.battery_kwh,
                 "battery smaller than the boundary state of charge");

        const double de = consumption_per_km(v.battery_kwh, econ);
        for (std::size_t s = 0; s + 1 < sched.size(); ++s) {
            const int i = sched[s], j = sched[s + 1];
            const PairBound& pb = b.at(i, j);
            double dist = pb.d_fp_km + ext.service_distance(j);
            double charged = 0.0;
            if (event_on[s]) {
                if (!pb.stations.empty() && event_on[s]->station >= 0 &&
                    event_on[s]->station < static_cast<int>(pb.stations.size()))
                    dist += pb.stations[event_on[s]->station].detour_dist_km;
                charged = event_on[s]->energy_kwh;
            }
            const double expect = soc(i) - de * dist + charged;
            if (std::abs(soc(j) - expect) > tol)
                flag("energy_balance", k, i, j, event_on[s] ? event_on[s]->station : -1,
                     soc(j) - expect, "state of charge breaks the energy balance");
        }
        for (int idx : sched) {
            if (soc(idx) < -tol)
                flag("soc_bounds", k, idx, -1, -1, soc(idx), "state of charge below zero");
            if (soc(idx) > v.battery_kwh + tol)
                flag("soc_bounds", k, idx, -1, -1, soc(idx) - v.battery_kwh,
                     "state of charge above the battery size");
        }
    }
};

} // namespace

std::vector<Violation> check_feasibility(const TransitionDag& dag, const EconomicParams& econ,
                                         int k_max, const ModelOptions& options,
                                         const FleetSolution& sol, double tol) {
    if (static_cast<int>(sol.vehicles.size()) > k_max)
        throw InvalidDimension("solution has more vehicles than k_max");
    Checker ch{dag, econ, options, sol, tol, {}};
    ch.run();
    return ch.out;
}

double objective_value(const FleetSolution& sol, const ExtendedRequestSet& extended,
                       const EconomicParams& econ) {
    double j = 0.0;
    for (const VehiclePlan& v : sol.vehicles) {
        if (v.used) j += (econ.p_v_eur + econ.p_b_eur_per_kwh * v.battery_kwh) / econ.tau_v_days;
        for (const ChargeEvent& ev : v.charge_events) j += econ.p_el_eur_per_kwh * ev.energy_kwh;
    }
    for (int i = 1; i < extended.end_index(); ++i)
        if (i < static_cast<int>(sol.served.size()) && sol.served[i]) j -= extended.price(i);
    return j;
}

} // namespace eamod
