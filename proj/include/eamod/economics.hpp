#pragma once

#include <string>
#include <vector>

namespace eamod {

/// Cost and consumption parameters shared by the fleet model and the
/// degradation analysis. tau_v_days amortizes purchase costs at the
/// reference operating point of 1.5 battery cycles per day (2500-cycle
/// battery, 30 kWh/day on a 20 kWh pack); keeping the exact ratio matters
/// for reproducing hand-computed objective values.
struct EconomicParams {
    double p_v_eur = 8000.0;            // vehicle price excluding battery
    double p_b_eur_per_kwh = 700.0;     // battery price per kWh
    double p_el_eur_per_kwh = 0.30;     // electricity price
    double tau_v_days = 2500.0 / 1.5;   // amortization horizon
    double tau_cycle = 2500.0;          // battery cycle budget
    double delta_e0_kwh_per_km = 0.09;  // base consumption
    double delta_eb_per_km = 0.0025;    // consumption growth per battery kWh
    double e_b_max_kwh = 60.0;          // fleet-wide battery capacity cap
    double e_b0_kwh = 10.0;             // state of charge at schedule start/end

    void validate() const; // throws ConfigError on out-of-range values
};

/// Consumption per km of a vehicle carrying an e_b_kwh battery.
double consumption_per_km(double e_b_kwh, const EconomicParams& econ);

/// Battery-bottleneck lifetime model: the pack survives tau_cycle full
/// cycles and the vehicle is written off when the pack is.
struct LifetimeModel {
    double tau_cycle = 2500.0;
    EconomicParams econ;
};

/// Full-cycle equivalents per day. Throws ZeroBattery for e_b_kwh <= 0.
double daily_cycles(double daily_energy_kwh, double e_b_kwh);

struct AmortizedCost {
    double lifetime_days = 0.0; // +infinity when the vehicle never cycles
    double cost_eur_per_day = 0.0;
};

/// Daily energy follows from the driven distance and the consumption law;
/// lifetime divides the cycle budget by daily cycles; the cost spreads the
/// purchase price over that lifetime.
AmortizedCost amortized_daily_cost(double e_b_kwh, double daily_distance_km,
                                   const LifetimeModel& model);

/// Amortized cost per driven km, (p_v + p_b*E)(de0 + deb*E)/(tau_cycle*E) —
/// independent of the daily distance, strictly convex on E > 0.
double amortized_cost_per_km(double e_b_kwh, const LifetimeModel& model);

/// Battery size minimizing the per-km amortized cost:
/// sqrt(p_v*de0 / (p_b*deb)).
double optimal_battery_unit_cost(const LifetimeModel& model);

/// Plot-ready curve: e_b_kwh, lifetime_days, cost_eur_per_day, cycles_per_day
/// at a fixed daily distance.
void write_cost_curve(const std::string& path, const LifetimeModel& model,
                      const std::vector<double>& e_b_grid, double daily_distance_km);

} // namespace eamod
