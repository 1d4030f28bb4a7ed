#include "eamod/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eamod/errors.hpp"

namespace eamod {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SimplexLp::SimplexLp(const MilpModel& model) {
    if (!model.finalized()) throw InvalidDimension("lp: model must be finalized");
    n_struct_ = model.n_vars();
    m_ = model.n_rows();

    cost_.assign(static_cast<std::size_t>(n_struct_ + m_), 0.0);
    lb_.assign(static_cast<std::size_t>(n_struct_ + m_), 0.0);
    ub_.assign(static_cast<std::size_t>(n_struct_ + m_), 0.0);
    for (int j = 0; j < n_struct_; ++j) {
        const ModelVar& v = model.var(j);
        cost_[j] = v.objective;
        lb_[j] = v.lower;
        ub_[j] = v.upper;
    }
    // Slack s_r with coefficient +1 turns each row into an equality; the row
    // sense moves into the slack's bounds.
    rhs_.resize(m_);
    for (int r = 0; r < m_; ++r) {
        const ModelRow& row = model.row(r);
        rhs_[r] = row.rhs;
        const int j = n_struct_ + r;
        switch (row.sense) {
            case RowSense::LE: lb_[j] = 0.0;   ub_[j] = kInf; break;
            case RowSense::GE: lb_[j] = -kInf; ub_[j] = 0.0;  break;
            case RowSense::EQ: lb_[j] = 0.0;   ub_[j] = 0.0;  break;
        }
    }

    // Transpose the model's row-wise CSR into column-major storage.
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_struct_) + 1, 0);
    for (int r = 0; r < m_; ++r)
        for (const auto* e = model.row_begin(r); e != model.row_end(r); ++e)
            ++counts[static_cast<std::size_t>(e->var) + 1];
    col_start_.assign(counts.begin(), counts.end());
    for (std::size_t j = 1; j < col_start_.size(); ++j) col_start_[j] += col_start_[j - 1];
    col_row_.resize(col_start_.back());
    col_val_.resize(col_start_.back());
    std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
    for (int r = 0; r < m_; ++r) {
        for (const auto* e = model.row_begin(r); e != model.row_end(r); ++e) {
            const std::size_t at = fill[e->var]++;
            col_row_[at] = r;
            col_val_[at] = e->coeff;
        }
    }

    xval_.assign(static_cast<std::size_t>(n_struct_), 0.0);
    reset_basis();
}

void SimplexLp::set_bounds(int var, double lower, double upper) {
    if (var < 0 || var >= n_struct_) throw InvalidDimension("lp: variable index out of range");
    if (lower > upper + 1e-12) throw InvalidDimension("lp: lower bound above upper bound");
    lb_[var] = lower;
    ub_[var] = upper;
}

double SimplexLp::col_lower(int j) const {
    return is_artificial(j) ? artificials_[j - n_struct_ - m_].lb : lb_[j];
}

double SimplexLp::col_upper(int j) const {
    return is_artificial(j) ? artificials_[j - n_struct_ - m_].ub : ub_[j];
}

double SimplexLp::nonbasic_value(int j) const {
    if (status_[j] == VarStatus::AtUpper) return col_upper(j);
    const double l = col_lower(j);
    return std::isfinite(l) ? l : 0.0;
}

template <typename Fn>
void SimplexLp::for_col(int j, Fn&& fn) const {
    if (is_artificial(j)) j = artificials_[j - n_struct_ - m_].alias;
    if (j < n_struct_) {
        for (std::size_t t = col_start_[j]; t < col_start_[j + 1]; ++t) fn(col_row_[t], col_val_[t]);
    } else {
        fn(j - n_struct_, 1.0);
    }
}

void SimplexLp::reset_basis() {
    artificials_.clear();
    status_.assign(static_cast<std::size_t>(n_struct_ + m_), VarStatus::AtLower);
    for (int j = 0; j < n_struct_ + m_; ++j)
        if (!std::isfinite(lb_[j])) status_[j] = VarStatus::AtUpper;
    basic_.resize(m_);
    for (int r = 0; r < m_; ++r) {
        basic_[r] = n_struct_ + r;
        status_[n_struct_ + r] = VarStatus::Basic;
    }
    factor_valid_ = false;
    dual_ready_ = false;
}

// Dense Gauss-Jordan inversion of the current basis matrix.  Throws on a
// singular basis; callers fall back to reset_basis().
void SimplexLp::refactor() {
    const std::size_t mm = static_cast<std::size_t>(m_) * m_;
    std::vector<double> b(mm, 0.0);
    for (int r = 0; r < m_; ++r)
        for_col(basic_[r], [&](int i, double v) { b[static_cast<std::size_t>(i) * m_ + r] += v; });

    binv_.assign(mm, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;

    std::vector<int> perm(m_);
    for (int i = 0; i < m_; ++i) perm[i] = i;
    for (int k = 0; k < m_; ++k) {
        int piv = -1;
        double best = 1e-11;
        for (int i = k; i < m_; ++i) {
            const double a = std::fabs(b[static_cast<std::size_t>(perm[i]) * m_ + k]);
            if (a > best) { best = a; piv = i; }
        }
        if (piv < 0) throw NumericalFailure("lp: singular basis during refactorization");
        std::swap(perm[k], perm[piv]);
        const int pr = perm[k];
        const double inv = 1.0 / b[static_cast<std::size_t>(pr) * m_ + k];
        double* brow = &b[static_cast<std::size_t>(pr) * m_];
        double* irow = &binv_[static_cast<std::size_t>(pr) * m_];
        for (int c = 0; c < m_; ++c) { brow[c] *= inv; irow[c] *= inv; }
        for (int i = 0; i < m_; ++i) {
            if (i == pr) continue;
            const double f = b[static_cast<std::size_t>(i) * m_ + k];
            if (f == 0.0) continue;
            double* bi = &b[static_cast<std::size_t>(i) * m_];
            double* ii = &binv_[static_cast<std::size_t>(i) * m_];
            for (int c = 0; c < m_; ++c) { bi[c] -= f * brow[c]; ii[c] -= f * irow[c]; }
        }
    }
    // Gauss-Jordan finished with B^-1 rows stored against the permuted pivot
    // order: row perm[k] of binv_ currently holds row k of the true inverse
    // only when column pivots advanced in step; undo the row permutation.
    std::vector<double> fixed(mm);
    for (int k = 0; k < m_; ++k) {
        const double* src = &binv_[static_cast<std::size_t>(perm[k]) * m_];
        std::copy(src, src + m_, &fixed[static_cast<std::size_t>(k) * m_]);
    }
    binv_.swap(fixed);
    factor_valid_ = true;
    updates_since_refactor_ = 0;
    ++stats_.refactors;
}

// Right-hand side with all nonbasic contributions removed.
void SimplexLp::compute_adj(std::vector<double>& adj) const {
    adj = rhs_;
    for (int j = 0; j < column_count(); ++j) {
        if (status_[j] == VarStatus::Basic) continue;
        const double v = nonbasic_value(j);
        if (v == 0.0) continue;
        for_col(j, [&](int r, double a) { adj[r] -= a * v; });
    }
}

void SimplexLp::compute_xb() {
    std::vector<double> adj;
    compute_adj(adj);
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += row[k] * adj[k];
        xb_[i] = s;
    }
}

// Sparse check of B x_B = adjusted rhs; catches eta-update drift cheaply.
double SimplexLp::basis_residual() const {
    std::vector<double> adj;
    compute_adj(adj);
    std::vector<double> bx(static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
        const double v = xb_[r];
        if (v == 0.0) continue;
        for_col(basic_[r], [&](int i, double a) { bx[i] += a * v; });
    }
    double scale = 1.0, err = 0.0;
    for (int i = 0; i < m_; ++i) {
        scale = std::max(scale, std::fabs(adj[i]));
        err = std::max(err, std::fabs(bx[i] - adj[i]));
    }
    return err / scale;
}

void SimplexLp::ftran(int j, std::vector<double>& w) const {
    w.assign(m_, 0.0);
    for_col(j, [&](int r, double a) {
        for (int i = 0; i < m_; ++i) w[i] += a * binv_[static_cast<std::size_t>(i) * m_ + r];
    });
}

// y = B^-T c_B, exploiting that most basic columns carry zero cost.
void SimplexLp::btran_cost(const std::vector<double>& cb_rows, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        const double c = cb_rows[i];
        if (c == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) y[k] += c * row[k];
    }
}

double SimplexLp::phase_cost(int j, int phase) const {
    if (phase == 1) return is_artificial(j) ? artificials_[j - n_struct_ - m_].phase1_cost : 0.0;
    return is_artificial(j) ? 0.0 : cost_[j];
}

int SimplexLp::price(const std::vector<double>& y, int phase, bool bland, double* best_d) const {
    int q = -1;
    double best = kDualTol;
    for (int j = 0; j < n_struct_ + m_; ++j) {  // artificials never re-enter
        const VarStatus st = status_[j];
        if (st == VarStatus::Basic) continue;
        const double l = lb_[j], u = ub_[j];
        if (l == u) continue;
        double d = phase_cost(j, phase);
        for_col(j, [&](int r, double a) { d -= y[r] * a; });
        double score = 0.0;
        if (st == VarStatus::AtLower && d < -kDualTol) score = -d;
        else if (st == VarStatus::AtUpper && d > kDualTol) score = d;
        else continue;
        if (bland) { *best_d = d; return j; }
        if (score > best) { best = score; q = j; *best_d = d; }
    }
    return q;
}

SimplexLp::Event SimplexLp::ratio_test(int q, double sigma, const std::vector<double>& w) const {
    Event ev;
    const double lq = col_lower(q), uq = col_upper(q);
    ev.t = (std::isfinite(lq) && std::isfinite(uq)) ? uq - lq : kInf;
    ev.row = -1;
    for (int i = 0; i < m_; ++i) {
        const double wi = w[i];
        if (std::fabs(wi) <= kPivotTol) continue;
        const int bj = basic_[i];
        const double delta = -sigma * wi;  // change of xb_[i] per unit step
        double bound, t;
        bool to_upper;
        if (delta < 0.0) {
            bound = col_lower(bj);
            if (!std::isfinite(bound)) continue;
            t = (xb_[i] - bound) / -delta;
            to_upper = false;
        } else {
            bound = col_upper(bj);
            if (!std::isfinite(bound)) continue;
            t = (bound - xb_[i]) / delta;
            to_upper = true;
        }
        if (t < 0.0) t = 0.0;  // basic value drifted past its bound
        if (t < ev.t - 1e-12 ||
            (t < ev.t + 1e-12 && ev.row >= 0 &&
             (std::fabs(wi) > std::fabs(ev.pivot) + 1e-12 ||
              (std::fabs(std::fabs(wi) - std::fabs(ev.pivot)) <= 1e-12 && bj < basic_[ev.row])))) {
            ev.t = t;
            ev.row = i;
            ev.to_upper = to_upper;
            ev.pivot = wi;
        }
    }
    return ev;
}

void SimplexLp::pivot(int q, double sigma, const Event& ev, const std::vector<double>& w) {
    if (ev.row < 0) {  // bound flip: the entering variable crosses its range
        for (int i = 0; i < m_; ++i) xb_[i] -= sigma * ev.t * w[i];
        status_[q] = (sigma > 0.0) ? VarStatus::AtUpper : VarStatus::AtLower;
        return;
    }
    const int leave = basic_[ev.row];
    const double start = (sigma > 0.0) ? col_lower(q) : col_upper(q);
    for (int i = 0; i < m_; ++i) xb_[i] -= sigma * ev.t * w[i];
    xb_[ev.row] = start + sigma * ev.t;
    basic_[ev.row] = q;
    status_[q] = VarStatus::Basic;
    status_[leave] = ev.to_upper ? VarStatus::AtUpper : VarStatus::AtLower;

    // Rank-one update of the dense inverse: B_new^-1 = E * B^-1.
    const double inv = 1.0 / w[ev.row];
    double* prow = &binv_[static_cast<std::size_t>(ev.row) * m_];
    for (int c = 0; c < m_; ++c) prow[c] *= inv;
    for (int i = 0; i < m_; ++i) {
        if (i == ev.row) continue;
        const double f = w[i];
        if (f == 0.0) continue;
        double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int c = 0; c < m_; ++c) row[c] -= f * prow[c];
    }
    ++updates_since_refactor_;
}

// Wrap each out-of-bounds basic variable: the variable retreats to its nearest
// bound as a nonbasic column and a same-column artificial takes its basis slot
// carrying the violation.  The point is then bound-feasible and phase 1 is an
// ordinary simplex run minimizing the artificial mass.
void SimplexLp::setup_artificials() {
    for (int r = 0; r < m_; ++r) {
        const int j = basic_[r];
        const double l = col_lower(j), u = col_upper(j);
        if (xb_[r] > u + kFeasTol) {
            Artificial a;
            a.alias = j;
            a.lb = 0.0;
            a.ub = kInf;
            a.phase1_cost = 1.0;
            const int id = column_count();
            artificials_.push_back(a);
            status_.push_back(VarStatus::Basic);
            basic_[r] = id;
            status_[j] = VarStatus::AtUpper;
            xb_[r] -= u;
        } else if (xb_[r] < l - kFeasTol) {
            Artificial a;
            a.alias = j;
            a.lb = -kInf;
            a.ub = 0.0;
            a.phase1_cost = -1.0;
            const int id = column_count();
            artificials_.push_back(a);
            status_.push_back(VarStatus::Basic);
            basic_[r] = id;
            status_[j] = VarStatus::AtLower;
            xb_[r] -= l;
        }
    }
}

// Swap every basic artificial back for its alias (identical basis column, so
// the factorization stays valid) and drop the artificial block.
void SimplexLp::purge_artificials() {
    for (int r = 0; r < m_; ++r) {
        if (!is_artificial(basic_[r])) continue;
        const int alias = artificials_[basic_[r] - n_struct_ - m_].alias;
        xb_[r] += nonbasic_value(alias);
        basic_[r] = alias;
        status_[alias] = VarStatus::Basic;
    }
    artificials_.clear();
    status_.resize(static_cast<std::size_t>(n_struct_ + m_));
}

double SimplexLp::infeasibility_sum() const {
    double s = 0.0;
    for (int r = 0; r < m_; ++r)
        if (is_artificial(basic_[r])) s += std::fabs(xb_[r]);
    return s;
}

LpStatus SimplexLp::run_phases(long iter_budget) {
    std::vector<double> y, w, cb;
    int phase = artificials_.empty() ? 2 : 1;
    bool bland = false;
    long stall = 0;
    double last_obj = kInf;
    long iters = 0;

    auto phase_objective = [&]() {
        if (phase == 1) return infeasibility_sum();
        double s = 0.0;
        for (int j = 0; j < n_struct_ + m_; ++j)
            if (cost_[j] != 0.0 && status_[j] != VarStatus::Basic) s += cost_[j] * nonbasic_value(j);
        for (int r = 0; r < m_; ++r) s += phase_cost(basic_[r], 2) * xb_[r];
        return s;
    };

    while (true) {
        if (phase == 1 && infeasibility_sum() <= 1e-9) {
            purge_artificials();
            phase = 2;
            bland = false;
            stall = 0;
            last_obj = kInf;
        }
        cb.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) cb[r] = phase_cost(basic_[r], phase);
        btran_cost(cb, y);
        double dq = 0.0;
        const int q = price(y, phase, bland, &dq);
        if (q < 0) {
            if (phase == 1) {
                const bool feasible = infeasibility_sum() <= kFeasTol;
                purge_artificials();
                if (!feasible) return LpStatus::Infeasible;
                phase = 2;
                bland = false;
                stall = 0;
                last_obj = kInf;
                continue;
            }
            return LpStatus::Optimal;
        }
        const double sigma = (status_[q] == VarStatus::AtLower) ? 1.0 : -1.0;
        ftran(q, w);
        const Event ev = ratio_test(q, sigma, w);
        if (!std::isfinite(ev.t)) {
            if (phase == 1) throw NumericalFailure("lp: unbounded phase-1 direction");
            throw NumericalFailure("lp: relaxation is unbounded");
        }
        pivot(q, sigma, ev, w);
        ++iters;
        ++total_iterations_;
        ++stats_.primal_pivots;
        if (iters > iter_budget) throw NumericalFailure("lp: iteration limit exceeded");
        if (updates_since_refactor_ >= kRefactorInterval) {
            refactor();
            compute_xb();
        }
        const double obj = phase_objective();
        if (obj < last_obj - 1e-12) {
            last_obj = obj;
            stall = 0;
        } else if (++stall > 500 && !bland) {
            bland = true;  // Dantzig cycling guard: fall back to Bland's rule
        }
    }
}

// Reduced costs of every column against the true objective.  Valid only with
// no artificials in play.
void SimplexLp::refresh_duals(std::vector<double>& d) const {
    std::vector<double> cb(static_cast<std::size_t>(m_)), y;
    for (int r = 0; r < m_; ++r) cb[r] = cost_[basic_[r]];
    btran_cost(cb, y);
    d.assign(static_cast<std::size_t>(n_struct_ + m_), 0.0);
    for (int j = 0; j < n_struct_ + m_; ++j) {
        if (status_[j] == VarStatus::Basic) continue;
        double dj = cost_[j];
        for_col(j, [&](int r, double a) { dj -= y[r] * a; });
        d[j] = dj;
    }
}

// Bounded-variable dual simplex from a dual-feasible basis.  Each iteration
// drives the worst primal bound violation out.  The ratio test walks the
// candidates in dual-price order and flips boxed columns whose price segment
// it passes (bound-flipping ratio test): one basis change then stands in for
// a whole chain of degenerate pivots, which matters in this binary-heavy
// model.  Stops early once the objective (a valid lower bound at every
// dual-feasible point) proves the caller's cutoff.
SimplexLp::DualOutcome SimplexLp::dual_simplex(long iter_budget, double cutoff, double* bound) {
    std::vector<double> d;
    refresh_duals(d);

    // Bound edits may have left a nonbasic column on the wrong side for its
    // reduced cost; boxed columns just hop to the attractive bound.  Columns
    // open toward infinity cannot hop, but their statuses and reduced costs
    // both survive bound edits untouched, so hitting one means the basis was
    // never dual feasible: let the primal phases handle it.
    bool flipped = false;
    for (int j = 0; j < n_struct_ + m_; ++j) {
        const VarStatus st = status_[j];
        if (st == VarStatus::Basic || lb_[j] == ub_[j]) continue;
        if (st == VarStatus::AtLower && d[j] < -kDualTol) {
            if (!std::isfinite(ub_[j])) return DualOutcome::GiveUp;
            status_[j] = VarStatus::AtUpper;
            flipped = true;
        } else if (st == VarStatus::AtUpper && d[j] > kDualTol) {
            if (!std::isfinite(lb_[j])) return DualOutcome::GiveUp;
            status_[j] = VarStatus::AtLower;
            flipped = true;
        }
    }
    if (flipped) compute_xb();

    auto current_objective = [&]() {
        double z = 0.0;
        for (int j = 0; j < n_struct_ + m_; ++j)
            if (cost_[j] != 0.0 && status_[j] != VarStatus::Basic) z += cost_[j] * nonbasic_value(j);
        for (int r = 0; r < m_; ++r) z += cost_[basic_[r]] * xb_[r];
        return z;
    };

    struct Cand {
        int j;
        double alpha;
        double ratio;
    };
    std::vector<double> alpha(static_cast<std::size_t>(n_struct_ + m_), 0.0), w, flip_rhs;
    std::vector<Cand> cands;
    std::vector<int> flips;
    long iters = 0, stall = 0;
    bool bland = false;
    int strikes = 0;

    while (true) {
        // Steepest-edge row choice: violation scaled by the true norm of the
        // inverse row (read straight off the dense factor).  Degenerate
        // models pick far fewer useless rows this way than max-violation.
        int r = -1;
        bool above = false;
        double worst = 0.0, best_score = 0.0;
        for (int i = 0; i < m_; ++i) {
            const int bj = basic_[i];
            double viol;
            bool ab;
            const double over = xb_[i] - ub_[bj];
            const double under = lb_[bj] - xb_[i];
            if (over > kFeasTol) {
                viol = over;
                ab = true;
            } else if (under > kFeasTol) {
                viol = under;
                ab = false;
            } else {
                continue;
            }
            const double* row = &binv_[static_cast<std::size_t>(i) * m_];
            double nrm = 0.0;
            for (int k2 = 0; k2 < m_; ++k2) nrm += row[k2] * row[k2];
            const double score = viol * viol / std::max(nrm, 1e-12);
            if (score > best_score) {
                best_score = score;
                r = i;
                above = ab;
                worst = viol;
            }
        }
        if (r < 0) {
            if (bound != nullptr) *bound = current_objective();
            return DualOutcome::Optimal;
        }
        if (iters >= iter_budget) return DualOutcome::GiveUp;
        if (std::isfinite(cutoff)) {
            const double z = current_objective();
            if (z >= cutoff) {
                if (bound != nullptr) *bound = z;
                return DualOutcome::Cutoff;
            }
        }

        const double* rho = &binv_[static_cast<std::size_t>(r) * m_];
        cands.clear();
        for (int j = 0; j < n_struct_ + m_; ++j) {
            const VarStatus st = status_[j];
            if (st == VarStatus::Basic || lb_[j] == ub_[j]) continue;
            double a = 0.0;
            for_col(j, [&](int i2, double v) { a += rho[i2] * v; });
            alpha[j] = a;
            const bool elig = above ? ((st == VarStatus::AtLower && a > kPivotTol) ||
                                       (st == VarStatus::AtUpper && a < -kPivotTol))
                                    : ((st == VarStatus::AtLower && a < -kPivotTol) ||
                                       (st == VarStatus::AtUpper && a > kPivotTol));
            if (!elig) continue;
            const double dj = (st == VarStatus::AtLower) ? d[j] : -d[j];
            cands.push_back({j, a, std::max(dj, 0.0) / std::fabs(a)});
        }
        if (cands.empty()) return DualOutcome::Infeasible;  // dual ray: no primal point

        if (bland) {
            // Cycling guard: plain min-ratio with lowest-index ties, no flips.
            std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
                return x.ratio < y.ratio || (x.ratio == y.ratio && x.j < y.j);
            });
            cands.resize(1);
        } else {
            std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
                if (x.ratio != y.ratio) return x.ratio < y.ratio;
                return std::fabs(x.alpha) > std::fabs(y.alpha);
            });
        }

        // Walk the price segments: flip boxed candidates whose full range the
        // violation still absorbs, enter at the first one it does not.
        double remaining = worst;
        flips.clear();
        int q = -1;
        for (std::size_t ci = 0; ci < cands.size(); ++ci) {
            const Cand& c = cands[ci];
            const double width = ub_[c.j] - lb_[c.j];
            const double cap = std::isfinite(width) ? std::fabs(c.alpha) * width : kInf;
            if (ci + 1 == cands.size() || cap >= remaining - 1e-9) {
                q = c.j;
                break;
            }
            flips.push_back(c.j);
            remaining -= cap;
        }

        const double sigma = (status_[q] == VarStatus::AtLower) ? 1.0 : -1.0;
        ftran(q, w);
        if (std::fabs(w[r]) <= kPivotTol) {
            // alpha row disagrees with a fresh ftran: factorization is stale
            if (++strikes > 1) return DualOutcome::GiveUp;
            refactor();
            compute_xb();
            refresh_duals(d);
            continue;
        }

        if (!flips.empty()) {
            // One combined solve replaces per-flip ftrans: xb -= B^-1 (A dx).
            flip_rhs.assign(static_cast<std::size_t>(m_), 0.0);
            for (const int fj : flips) {
                const double dx = (status_[fj] == VarStatus::AtLower) ? (ub_[fj] - lb_[fj])
                                                                      : (lb_[fj] - ub_[fj]);
                status_[fj] = (status_[fj] == VarStatus::AtLower) ? VarStatus::AtUpper
                                                                  : VarStatus::AtLower;
                for_col(fj, [&](int i2, double v) { flip_rhs[i2] += v * dx; });
            }
            for (int i = 0; i < m_; ++i) {
                const double* row = &binv_[static_cast<std::size_t>(i) * m_];
                double s = 0.0;
                for (int k2 = 0; k2 < m_; ++k2) s += row[k2] * flip_rhs[k2];
                xb_[i] -= s;
            }
        }

        const double target = above ? ub_[basic_[r]] : lb_[basic_[r]];
        double t = (xb_[r] - target) / (sigma * w[r]);
        if (t < 0.0) t = 0.0;
        const double theta = d[q] / w[r];  // signed dual step along row r
        const int leave = basic_[r];

        Event ev;
        ev.t = t;
        ev.row = r;
        ev.to_upper = above;
        ev.pivot = w[r];
        pivot(q, sigma, ev, w);

        for (int j = 0; j < n_struct_ + m_; ++j) {
            if (status_[j] == VarStatus::Basic || lb_[j] == ub_[j]) continue;
            d[j] -= theta * alpha[j];
        }
        d[leave] = -theta;
        d[q] = 0.0;

        ++iters;
        ++total_iterations_;
        ++stats_.dual_pivots;
        if (std::fabs(theta) <= 1e-12) {
            if (++stall > 200) bland = true;
        } else {
            stall = 0;
        }
        if (updates_since_refactor_ >= kRefactorInterval) {
            refactor();
            compute_xb();
            refresh_duals(d);
        }
    }
}

// Residual + bound verification and solution extraction; false means the
// factorization drifted and the caller should repair and re-run.
bool SimplexLp::extract(LpResult& res) {
    bool ok = basis_residual() <= 1e-7;
    for (int r = 0; r < m_ && ok; ++r) {
        const int j = basic_[r];
        if (xb_[r] > col_upper(j) + 1e-6 || xb_[r] < col_lower(j) - 1e-6) ok = false;
    }
    if (!ok) return false;
    for (int j = 0; j < n_struct_; ++j)
        xval_[j] = (status_[j] == VarStatus::Basic) ? 0.0 : nonbasic_value(j);
    for (int r = 0; r < m_; ++r)
        if (basic_[r] < n_struct_) xval_[basic_[r]] = xb_[r];
    double obj = 0.0;
    for (int j = 0; j < n_struct_; ++j) {
        xval_[j] = std::min(std::max(xval_[j], lb_[j]), ub_[j]);
        obj += cost_[j] * xval_[j];
    }
    res.status = LpStatus::Optimal;
    res.objective = obj;
    res.iterations = total_iterations_;
    dual_ready_ = true;
    return true;
}

LpResult SimplexLp::solve(double cutoff) {
    LpResult res;
    const long iter_budget = 200000L + 50L * (n_struct_ + m_);
    for (int attempt = 0; attempt < 3; ++attempt) {
        try {
            if (!factor_valid_) refactor();
            compute_xb();
            if (dual_ready_ && artificials_.empty()) {
                double bound = -kInf;
                const DualOutcome out = dual_simplex(2000L + 4L * m_, cutoff, &bound);
                if (out == DualOutcome::Infeasible) {
                    // Dual pivots preserve dual feasibility, so the basis
                    // stays warm for the next bound change.
                    res.status = LpStatus::Infeasible;
                    res.iterations = total_iterations_;
                    return res;
                }
                if (out == DualOutcome::Cutoff) {
                    // Valid lower bound at or past the cutoff; the caller
                    // prunes, so variable values are not refreshed.
                    res.status = LpStatus::Optimal;
                    res.objective = bound;
                    res.iterations = total_iterations_;
                    return res;
                }
                if (out == DualOutcome::Optimal && extract(res)) return res;
                ++stats_.dual_giveups;
                refactor();
                compute_xb();
            }
            ++stats_.primal_runs;
            setup_artificials();
            const LpStatus st = run_phases(iter_budget);
            if (st == LpStatus::Infeasible) {
                dual_ready_ = false;
                res.status = LpStatus::Infeasible;
                res.iterations = total_iterations_;
                return res;
            }
            if (extract(res)) return res;
            // Drift: repair the factorization (or the whole basis) and
            // run the phases again from the repaired state.
            refactor();
            compute_xb();
            if (attempt == 1) reset_basis();
        } catch (const NumericalFailure&) {
            reset_basis();  // also drops any in-flight artificials
            if (attempt == 2) throw;
        }
    }
    throw NumericalFailure("lp: could not reach a verified solution");
}

}  // namespace eamod
