#include "eamod/economics.hpp"

#include <cmath>
#include <limits>

#include "eamod/csv.hpp"
#include "eamod/errors.hpp"

namespace eamod {

void EconomicParams::validate() const {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) throw ConfigError(key, "must be positive");
    };
    positive("p_v_eur", p_v_eur);
    positive("p_b_eur_per_kwh", p_b_eur_per_kwh);
    positive("p_el_eur_per_kwh", p_el_eur_per_kwh);
    positive("tau_v_days", tau_v_days);
    positive("tau_cycle", tau_cycle);
    positive("delta_e0_kwh_per_km", delta_e0_kwh_per_km);
    positive("delta_eb_per_km", delta_eb_per_km);
    positive("e_b_max_kwh", e_b_max_kwh);
    positive("e_b0_kwh", e_b0_kwh);
    if (e_b0_kwh > e_b_max_kwh)
        throw ConfigError("e_b0_kwh", "must not exceed e_b_max_kwh");
}

double consumption_per_km(double e_b_kwh, const EconomicParams& econ) {
    return econ.delta_e0_kwh_per_km + econ.delta_eb_per_km * e_b_kwh;
}

double daily_cycles(double daily_energy_kwh, double e_b_kwh) {
    if (e_b_kwh <= 0.0) throw ZeroBattery();
    return daily_energy_kwh / e_b_kwh;
}

AmortizedCost amortized_daily_cost(double e_b_kwh, double daily_distance_km,
                                   const LifetimeModel& model) {
    if (e_b_kwh <= 0.0) throw ZeroBattery();
    const double daily_energy = daily_distance_km * consumption_per_km(e_b_kwh, model.econ);
    const double cycles = daily_cycles(daily_energy, e_b_kwh);
    AmortizedCost out;
    if (cycles <= 0.0) {
        out.lifetime_days = std::numeric_limits<double>::infinity();
        out.cost_eur_per_day = 0.0;
        return out;
    }
    out.lifetime_days = model.tau_cycle / cycles;
    out.cost_eur_per_day =
        (model.econ.p_v_eur + model.econ.p_b_eur_per_kwh * e_b_kwh) / out.lifetime_days;
    return out;
}

double amortized_cost_per_km(double e_b_kwh, const LifetimeModel& model) {
    if (e_b_kwh <= 0.0) throw ZeroBattery();
    return (model.econ.p_v_eur + model.econ.p_b_eur_per_kwh * e_b_kwh) *
           consumption_per_km(e_b_kwh, model.econ) / (model.tau_cycle * e_b_kwh);
}

double optimal_battery_unit_cost(const LifetimeModel& model) {
    return std::sqrt(model.econ.p_v_eur * model.econ.delta_e0_kwh_per_km /
                     (model.econ.p_b_eur_per_kwh * model.econ.delta_eb_per_km));
}

void write_cost_curve(const std::string& path, const LifetimeModel& model,
                      const std::vector<double>& e_b_grid, double daily_distance_km) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(e_b_grid.size());
    for (double e_b : e_b_grid) {
        const AmortizedCost c = amortized_daily_cost(e_b, daily_distance_km, model);
        const double cycles =
            daily_cycles(daily_distance_km * consumption_per_km(e_b, model.econ), e_b);
        rows.push_back({format_double(e_b), format_double(c.lifetime_days),
                        format_double(c.cost_eur_per_day), format_double(cycles)});
    }
    write_csv(path, {"e_b_kwh", "lifetime_days", "cost_eur_per_day", "cycles_per_day"}, rows);
}

} // namespace eamod
