#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "eamod/economics.hpp"
#include "eamod/transition_graph.hpp"

namespace eamod {

enum class VarKind : std::uint8_t { Continuous, Binary };
enum class RowSense : std::uint8_t { LE, GE, EQ };

/// Semantic address of a model variable, mapping it back to fleet actions.
struct VarKey {
    enum class Type : std::uint8_t {
        None,
        Transition,    // X: vehicle k drives transition (i, j)
        ChargeStop,    // S: k charges at station c within (i, j)
        ChargeAmount,  // C: energy charged at that stop, kWh
        TransitionEnergy, // E: energy spent on transition (i, j) incl. service of j
        Soc,           // e: state of charge after serving i
        Battery,       // E_b of vehicle k
        VehicleUsed,   // b_v
        RequestServed, // b_r
    };
    Type type = Type::None;
    int i = -1, j = -1, k = -1, c = -1;

    friend bool operator<(const VarKey& a, const VarKey& b) {
        return std::tie(a.type, a.i, a.j, a.k, a.c) < std::tie(b.type, b.i, b.j, b.k, b.c);
    }
    friend bool operator==(const VarKey& a, const VarKey& b) {
        return std::tie(a.type, a.i, a.j, a.k, a.c) == std::tie(b.type, b.i, b.j, b.k, b.c);
    }
};

struct ModelVar {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;
    double objective = 0.0;
    VarKey key;
};

struct ModelRow {
    std::string name;
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
    std::string family;
};

/// Sparse MILP: min c'x subject to row senses and variable bounds. Built
/// row-by-row during assembly, then finalized into CSR form; immutable
/// afterwards except for variable-bound edits made before solving.
class MilpModel {
public:
    int add_var(ModelVar v);
    int add_row(ModelRow r);
    void add_coeff(int row, int var, double value);
    void finalize(); // compresses coefficients; further rows/coeffs are a bug
    bool finalized() const { return finalized_; }

    int n_vars() const { return static_cast<int>(vars_.size()); }
    int n_rows() const { return static_cast<int>(rows_.size()); }
    const std::vector<ModelVar>& vars() const { return vars_; }
    const std::vector<ModelRow>& rows() const { return rows_; }
    const ModelVar& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }
    const ModelRow& row(int r) const { return rows_[static_cast<std::size_t>(r)]; }

    struct Entry {
        int var;
        double coeff;
    };
    // coefficients of one row; valid only after finalize()
    const Entry* row_begin(int row) const { return entries_.data() + row_start_[row]; }
    const Entry* row_end(int row) const { return entries_.data() + row_start_[row + 1]; }

    int var_by_key(const VarKey& key) const; // -1 when absent
    void set_var_bounds(int var, double lower, double upper);
    void set_var_kind(int var, VarKind kind) { vars_[static_cast<std::size_t>(var)].kind = kind; }
    void set_var_name(int var, std::string name) { vars_[static_cast<std::size_t>(var)].name = std::move(name); }
    void set_row_name(int row, std::string name) { rows_[static_cast<std::size_t>(row)].name = std::move(name); }
    void set_rhs(int row, double rhs) { rows_[static_cast<std::size_t>(row)].rhs = rhs; }
    void set_var_objective(int var, double c) { vars_[static_cast<std::size_t>(var)].objective = c; }

    double big_m_energy() const { return big_m_energy_; }
    void set_big_m_energy(double m) { big_m_energy_ = m; }

    std::map<std::string, std::size_t> rows_per_family() const;

private:
    std::vector<ModelVar> vars_;
    std::vector<ModelRow> rows_;
    std::vector<std::vector<Entry>> pending_;
    std::vector<std::size_t> row_start_;
    std::vector<Entry> entries_;
    std::map<VarKey, int> key_index_;
    bool finalized_ = false;
    double big_m_energy_ = 0.0;
};

struct ModelOptions {
    bool homogeneous = true;                 // one battery size across used vehicles
    std::optional<double> fixed_battery_kwh; // pin E_b of used vehicles to a value
    std::optional<int> min_served;           // lower bound on total served requests
};

/// Assembles the fleet design-and-operation MILP over the transition DAG:
/// per-vehicle transition binaries, charge stops and amounts, transition
/// energies, states of charge, battery sizes, usage flags, plus fleet-wide
/// served-request flags. Objective: amortized purchase cost + electricity
/// cost - fare revenue.
MilpModel assemble_model(const TransitionDag& dag, int k_max, const EconomicParams& econ,
                         const ModelOptions& options = {});

/// Writes a JSON summary (variable/row counts per family, big-M) for
/// inspection.
void write_model_summary(const MilpModel& model, const std::string& path);

struct ChargeEvent {
    int after = 0;   // transition tail request
    int before = 0;  // transition head request
    int station = -1;
    double energy_kwh = 0.0;
};

struct VehiclePlan {
    bool used = false;
    double battery_kwh = 0.0;
    std::vector<int> schedule;        // extended indices, 0 ... I+1
    std::vector<ChargeEvent> charge_events;
    std::vector<double> energy_at;    // by extended index; meaningful on schedule stops
};

enum class SolveStatus : std::uint8_t { Optimal, Feasible, Infeasible, TimeLimit };

struct FleetSolution {
    std::vector<VehiclePlan> vehicles;
    std::vector<char> served;         // by extended index; depots stay 0
    double objective_eur = 0.0;
    double gap = 0.0;
    SolveStatus status = SolveStatus::Infeasible;
};

struct Violation {
    std::string family;
    int k = -1, i = -1, j = -1, c = -1;
    double residual = 0.0;
    std::string detail;
};

/// Re-verifies a candidate solution against every constraint family, straight
/// from the DAG data (no model instance needed). Empty result iff feasible
/// within tol.
std::vector<Violation> check_feasibility(const TransitionDag& dag, const EconomicParams& econ,
                                         int k_max, const ModelOptions& options,
                                         const FleetSolution& sol, double tol);

/// Recomputes the objective independently of any solver report.
double objective_value(const FleetSolution& sol, const ExtendedRequestSet& extended,
                       const EconomicParams& econ);

} // namespace eamod
