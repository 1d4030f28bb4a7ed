#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "eamod/milp_core.hpp"

namespace eamod {

enum class LpStatus { Optimal, Infeasible };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    long iterations = 0;
};

// Cumulative engine counters, mostly for performance diagnosis.
struct LpStats {
    long dual_pivots = 0;
    long primal_pivots = 0;
    long dual_giveups = 0;   // dual warm starts that fell back to primal
    long primal_runs = 0;    // artificial-phase primal entries
    long refactors = 0;
};

// Bounded-variable revised simplex over the continuous relaxation of a
// MilpModel.  The instance keeps its basis between solve() calls, so callers
// that tighten or restore variable bounds (branch and bound) get warm starts
// for free.  Re-solves after pure bound changes start from the dual simplex:
// reduced costs depend only on the basis, so the old optimal basis stays dual
// feasible (boxed columns are re-slotted onto their attractive bound) and a
// few dual pivots restore primal feasibility.  Cold starts and dual bailouts
// go through a primal run whose phase 1 absorbs infeasible basic values with
// temporary artificial columns duplicating the offending basis column, which
// lets one pivot loop serve as both phase 1 and phase 2.
class SimplexLp {
public:
    explicit SimplexLp(const MilpModel& model);

    int n_structural() const { return n_struct_; }
    int n_rows() const { return m_; }

    // Bounds live on the relaxation, not the model: branching mutates them.
    void set_bounds(int var, double lower, double upper);
    double lower(int var) const { return lb_[var]; }
    double upper(int var) const { return ub_[var]; }

    // Solves the relaxation from the current basis.  With a finite cutoff the
    // dual warm start may stop early once its objective (a valid lower bound)
    // reaches the cutoff; the result then carries that bound and stale
    // variable values, which is exactly what a pruning caller needs.
    LpResult solve(double cutoff = std::numeric_limits<double>::infinity());

    // Structural variable values from the most recent solve.
    const std::vector<double>& values() const { return xval_; }
    double value(int var) const { return xval_[var]; }

    // Forget the current basis and restart from the all-slack one.
    void reset_basis();

    long total_iterations() const { return total_iterations_; }
    const LpStats& stats() const { return stats_; }

private:
    enum class VarStatus : std::uint8_t { AtLower, AtUpper, Basic };

    struct Artificial {
        int alias = -1;        // variable whose column this artificial copies
        double lb = 0.0;
        double ub = 0.0;
        double phase1_cost = 0.0;
    };

    struct Event {
        double t = 0.0;
        int row = -1;          // -1: entering variable hits its other bound
        bool to_upper = false; // side the leaving variable stops at
        double pivot = 0.0;
    };

    int column_count() const { return n_struct_ + m_ + static_cast<int>(artificials_.size()); }
    bool is_artificial(int j) const { return j >= n_struct_ + m_; }
    double col_lower(int j) const;
    double col_upper(int j) const;
    double nonbasic_value(int j) const;
    template <typename Fn> void for_col(int j, Fn&& fn) const;

    void refactor();
    void compute_adj(std::vector<double>& adj) const;
    void compute_xb();
    double basis_residual() const;
    void ftran(int j, std::vector<double>& w) const;
    void btran_cost(const std::vector<double>& cb_rows, std::vector<double>& y) const;
    double phase_cost(int j, int phase) const;
    int price(const std::vector<double>& y, int phase, bool bland, double* best_d) const;
    Event ratio_test(int q, double sigma, const std::vector<double>& w) const;
    void pivot(int q, double sigma, const Event& ev, const std::vector<double>& w);
    void setup_artificials();
    void purge_artificials();
    double infeasibility_sum() const;
    LpStatus run_phases(long iter_budget);

    enum class DualOutcome { Optimal, Infeasible, Cutoff, GiveUp };
    void refresh_duals(std::vector<double>& d) const;
    DualOutcome dual_simplex(long iter_budget, double cutoff, double* bound);
    bool extract(LpResult& res);

    int n_struct_ = 0;
    int m_ = 0;
    std::vector<double> cost_;          // structural + slack objective
    std::vector<double> lb_, ub_;       // structural + slack bounds
    std::vector<double> rhs_;

    std::vector<std::size_t> col_start_; // CSC of structural columns
    std::vector<int> col_row_;
    std::vector<double> col_val_;

    std::vector<Artificial> artificials_;

    std::vector<VarStatus> status_;     // per column, artificials appended
    std::vector<int> basic_;            // column basic in each row
    std::vector<double> xb_;            // values of basic columns
    std::vector<double> binv_;          // dense row-major inverse of the basis
    std::vector<double> xval_;          // structural values after solve
    bool factor_valid_ = false;
    bool dual_ready_ = false;           // basis known dual feasible (post-optimal)
    int updates_since_refactor_ = 0;
    long total_iterations_ = 0;
    LpStats stats_;

    static constexpr double kPivotTol = 1e-9;
    static constexpr double kDualTol = 1e-7;
    static constexpr double kFeasTol = 1e-7;
    static constexpr int kRefactorInterval = 128;
};

}  // namespace eamod
