#include "fillvol/exact_opt.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fillvol {

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::OPTIMAL: return "OPTIMAL";
        case SolveStatus::INFEASIBLE: return "INFEASIBLE";
        case SolveStatus::UNBOUNDED: return "UNBOUNDED";
        case SolveStatus::TIME_LIMIT: return "TIME_LIMIT";
    }
    return "?";
}

int OptProblem::add_variable(Rat cost_abs, bool integral) {
    if (cost_abs < 0)
        throw std::invalid_argument("objective weight must be nonnegative");
    OptVariable v;
    v.cost = std::move(cost_abs);
    v.integral = integral;
    vars_.push_back(std::move(v));
    return (int)vars_.size() - 1;
}

void OptProblem::set_parity(int var, int parity_mod2) {
    vars_.at((size_t)var).parity = ((parity_mod2 % 2) + 2) % 2;
}

void OptProblem::set_bounds(int var, std::optional<Rat> lo, std::optional<Rat> hi) {
    vars_.at((size_t)var).lower = std::move(lo);
    vars_.at((size_t)var).upper = std::move(hi);
}

int OptProblem::add_constraint(std::vector<LinTerm> terms, Rat rhs) {
    cons_.push_back(OptConstraint{std::move(terms), std::move(rhs)});
    return (int)cons_.size() - 1;
}

void OptProblem::add_term(int constraint, int var, Rat coeff) {
    cons_.at((size_t)constraint).terms.push_back(LinTerm{var, std::move(coeff)});
}

std::string OptProblem::dump() const {
    std::ostringstream os;
    os << "min ";
    for (size_t v = 0; v < vars_.size(); ++v) {
        if (v) os << " + ";
        os << vars_[v].cost.get_str() << "*|x" << v << "|";
    }
    os << "\nsubject to\n";
    for (size_t c = 0; c < cons_.size(); ++c) {
        os << "  c" << c << ": ";
        for (size_t t = 0; t < cons_[c].terms.size(); ++t) {
            if (t) os << " + ";
            os << cons_[c].terms[t].coeff.get_str() << "*x"
               << cons_[c].terms[t].var;
        }
        os << " = " << cons_[c].rhs.get_str() << "\n";
    }
    for (size_t v = 0; v < vars_.size(); ++v) {
        const auto& vv = vars_[v];
        if (vv.integral) os << "  x" << v << " integral\n";
        if (vv.parity) os << "  x" << v << " == " << *vv.parity << " (mod 2)\n";
        if (vv.lower) os << "  x" << v << " >= " << vv.lower->get_str() << "\n";
        if (vv.upper) os << "  x" << v << " <= " << vv.upper->get_str() << "\n";
    }
    return os.str();
}

namespace {

// One-sided bound used during branch and bound. entity refers to the problem
// variable; for parity variables the bound is on w where x = a + 2w.
struct BranchBound {
    int var;
    bool on_w;
    bool is_upper;
    Rat bound;
};

struct Budget {
    long long pivots_left;
    bool unlimited;
    std::chrono::steady_clock::time_point deadline;
    bool has_deadline;
    bool exhausted() const {
        if (!unlimited && pivots_left <= 0) return true;
        if (has_deadline && std::chrono::steady_clock::now() > deadline)
            return true;
        return false;
    }
};

// Dense exact-rational primal simplex (full tableau, two-phase, Bland).
class Simplex {
public:
    // Columns: for each problem var: x+ , x-; for parity vars additionally
    // w+, w-. Then one slack per inequality (bounds). Artificials appended.
    struct Layout {
        std::vector<int> xpos, xneg;  // per var
        std::vector<int> wpos, wneg;  // per var, -1 if no parity
        int ncols = 0;
    };

    Simplex(const OptProblem& p, const std::vector<BranchBound>& bounds,
            Budget& budget)
        : p_(p), budget_(budget) {
        build(bounds);
    }

    SolveStatus run() {
        if (!phase1()) return SolveStatus::INFEASIBLE;
        int r = phase2();
        if (r == 1) return SolveStatus::UNBOUNDED;
        if (r == 2) return SolveStatus::TIME_LIMIT;
        return SolveStatus::OPTIMAL;
    }

    Rat objective_value() const {
        Rat v(0);
        for (int i = 0; i < m_; ++i)
            if (basis_[(size_t)i] >= 0)
                v += cost_[(size_t)basis_[(size_t)i]] * rhs_[(size_t)i];
        return v;
    }

    std::vector<Rat> witness() const {
        std::vector<Rat> xs((size_t)p_.num_variables(), Rat(0));
        std::vector<Rat> colval((size_t)lay_.ncols + (size_t)m_, Rat(0));
        for (int i = 0; i < m_; ++i)
            if (basis_[(size_t)i] >= 0)
                colval[(size_t)basis_[(size_t)i]] = rhs_[(size_t)i];
        for (int v = 0; v < p_.num_variables(); ++v)
            xs[(size_t)v] = colval[(size_t)lay_.xpos[(size_t)v]] -
                            colval[(size_t)lay_.xneg[(size_t)v]];
        return xs;
    }

    // Duals for the ORIGINAL problem constraints (first nc_ rows).
    std::vector<Rat> duals() const {
        std::vector<Rat> y((size_t)p_.num_constraints());
        for (int i = 0; i < p_.num_constraints(); ++i) {
            // reduced cost of artificial i is -y_i in the sign-flipped system
            int col = art0_ + i;
            Rat rc = reduced_cost(col);
            y[(size_t)i] = -rc * rowsign_[(size_t)i];
        }
        return y;
    }

private:
    const OptProblem& p_;
    Budget& budget_;
    Layout lay_;
    int m_ = 0;          // rows
    int nc_ = 0;         // problem constraints (first rows)
    int art0_ = 0;       // first artificial column
    std::vector<std::vector<Rat>> tab_; // m x ncols+artificials
    std::vector<Rat> rhs_;
    std::vector<Rat> cost_;    // phase-2 costs per column
    std::vector<Rat> zrow_;    // current reduced-cost row
    Rat zshift_;
    std::vector<int> basis_;
    std::vector<int> rowsign_;
    bool in_phase1_ = false;

    Rat reduced_cost(int col) const { return zrow_[(size_t)col]; }

    void build(const std::vector<BranchBound>& bounds) {
        const int nv = p_.num_variables();
        lay_.xpos.resize((size_t)nv);
        lay_.xneg.resize((size_t)nv);
        lay_.wpos.assign((size_t)nv, -1);
        lay_.wneg.assign((size_t)nv, -1);
        int col = 0;
        for (int v = 0; v < nv; ++v) {
            lay_.xpos[(size_t)v] = col++;
            lay_.xneg[(size_t)v] = col++;
            if (p_.variable(v).parity) {
                lay_.wpos[(size_t)v] = col++;
                lay_.wneg[(size_t)v] = col++;
            }
        }
        // rows: constraints, parity links, bound rows (with slack columns)
        struct Row {
            std::vector<std::pair<int, Rat>> entries;
            Rat rhs;
        };
        std::vector<Row> rows;
        nc_ = p_.num_constraints();
        for (int c = 0; c < nc_; ++c) {
            Row r;
            r.rhs = p_.constraint(c).rhs;
            for (auto& t : p_.constraint(c).terms) {
                r.entries.push_back({lay_.xpos[(size_t)t.var], t.coeff});
                r.entries.push_back({lay_.xneg[(size_t)t.var], -t.coeff});
            }
            rows.push_back(std::move(r));
        }
        for (int v = 0; v < nv; ++v) {
            if (!p_.variable(v).parity) continue;
            // x - 2w = a
            Row r;
            r.rhs = Rat(*p_.variable(v).parity);
            r.entries = {{lay_.xpos[(size_t)v], Rat(1)},
                         {lay_.xneg[(size_t)v], Rat(-1)},
                         {lay_.wpos[(size_t)v], Rat(-2)},
                         {lay_.wneg[(size_t)v], Rat(2)}};
            rows.push_back(std::move(r));
        }
        auto bound_row = [&](int var, bool on_w, bool upper, const Rat& b) {
            (void)upper;
            Row r;
            int cp = on_w ? lay_.wpos[(size_t)var] : lay_.xpos[(size_t)var];
            int cn = on_w ? lay_.wneg[(size_t)var] : lay_.xneg[(size_t)var];
            r.entries = {{cp, Rat(1)}, {cn, Rat(-1)}};
            r.rhs = b;
            rows.push_back(std::move(r));
            return (int)rows.size() - 1;
        };
        std::vector<std::pair<int, bool>> slack_of_row; // (row, is_upper)
        for (int v = 0; v < nv; ++v) {
            if (p_.variable(v).lower)
                slack_of_row.push_back({bound_row(v, false, false, *p_.variable(v).lower), false});
            if (p_.variable(v).upper)
                slack_of_row.push_back({bound_row(v, false, true, *p_.variable(v).upper), true});
        }
        for (auto& bb : bounds)
            slack_of_row.push_back({bound_row(bb.var, bb.on_w, bb.is_upper, bb.bound), bb.is_upper});
        // slack columns
        int nslack = (int)slack_of_row.size();
        int slack0 = col;
        col += nslack;
        lay_.ncols = col;
        m_ = (int)rows.size();
        art0_ = lay_.ncols;
        int total = lay_.ncols + m_;
        tab_.assign((size_t)m_, std::vector<Rat>((size_t)total, Rat(0)));
        rhs_.assign((size_t)m_, Rat(0));
        cost_.assign((size_t)total, Rat(0));
        basis_.assign((size_t)m_, -1);
        rowsign_.assign((size_t)m_, 1);
        for (int i = 0; i < m_; ++i) {
            for (auto& [c, q] : rows[(size_t)i].entries) tab_[(size_t)i][(size_t)c] += q;
            rhs_[(size_t)i] = rows[(size_t)i].rhs;
        }
        for (int s = 0; s < nslack; ++s) {
            auto [row, is_upper] = slack_of_row[(size_t)s];
            // upper: x + s = u ; lower: x - s = l
            tab_[(size_t)row][(size_t)(slack0 + s)] = is_upper ? Rat(1) : Rat(-1);
        }
        // phase-2 costs
        for (int v = 0; v < nv; ++v) {
            cost_[(size_t)lay_.xpos[(size_t)v]] = p_.variable(v).cost;
            cost_[(size_t)lay_.xneg[(size_t)v]] = p_.variable(v).cost;
        }
        // sign-flip rows so rhs >= 0, install artificials
        for (int i = 0; i < m_; ++i) {
            if (rhs_[(size_t)i] < 0) {
                rowsign_[(size_t)i] = -1;
                rhs_[(size_t)i] = -rhs_[(size_t)i];
                for (auto& q : tab_[(size_t)i]) q = -q;
            }
            tab_[(size_t)i][(size_t)(art0_ + i)] = Rat(1);
            basis_[(size_t)i] = art0_ + i;
        }
    }

    void compute_zrow(bool phase1) {
        int total = lay_.ncols + m_;
        zrow_.assign((size_t)total, Rat(0));
        zshift_ = 0;
        std::vector<Rat> cb((size_t)m_);
        for (int i = 0; i < m_; ++i) {
            int b = basis_[(size_t)i];
            cb[(size_t)i] = phase1 ? (b >= art0_ ? Rat(1) : Rat(0))
                                   : cost_[(size_t)b];
        }
        for (int j = 0; j < total; ++j) {
            Rat cj = phase1 ? (j >= art0_ ? Rat(1) : Rat(0)) : cost_[(size_t)j];
            Rat acc(0);
            for (int i = 0; i < m_; ++i)
                if (cb[(size_t)i] != 0) acc += cb[(size_t)i] * tab_[(size_t)i][(size_t)j];
            zrow_[(size_t)j] = cj - acc;
        }
    }

    void pivot(int row, int col) {
        Rat piv = tab_[(size_t)row][(size_t)col];
        int total = lay_.ncols + m_;
        if (piv != 1) {
            Rat inv = 1 / piv;
            for (int j = 0; j < total; ++j) {
                if (tab_[(size_t)row][(size_t)j] != 0) tab_[(size_t)row][(size_t)j] *= inv;
            }
            rhs_[(size_t)row] *= inv;
        }
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            Rat f = tab_[(size_t)i][(size_t)col];
            if (f == 0) continue;
            for (int j = 0; j < total; ++j) {
                if (tab_[(size_t)row][(size_t)j] != 0)
                    tab_[(size_t)i][(size_t)j] -= f * tab_[(size_t)row][(size_t)j];
            }
            rhs_[(size_t)i] -= f * rhs_[(size_t)row];
        }
        Rat zf = zrow_[(size_t)col];
        if (zf != 0) {
            for (int j = 0; j < total; ++j)
                if (tab_[(size_t)row][(size_t)j] != 0)
                    zrow_[(size_t)j] -= zf * tab_[(size_t)row][(size_t)j];
            zshift_ += zf * rhs_[(size_t)row];
        }
        basis_[(size_t)row] = col;
        if (!budget_.unlimited) --budget_.pivots_left;
    }

    // returns 0 = optimal, 1 = unbounded, 2 = budget exhausted
    int iterate(bool allow_artificials) {
        int total = lay_.ncols + m_;
        int limit = allow_artificials ? total : lay_.ncols;
        while (true) {
            if (budget_.exhausted()) return 2;
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (!allow_artificials && j >= lay_.ncols) break;
                if (zrow_[(size_t)j] < 0) { enter = j; break; } // Bland: lowest index
            }
            if (enter < 0) return 0;
            int leave = -1;
            Rat best;
            for (int i = 0; i < m_; ++i) {
                const Rat& a = tab_[(size_t)i][(size_t)enter];
                if (a > 0) {
                    Rat ratio = rhs_[(size_t)i] / a;
                    if (leave < 0 || ratio < best ||
                        (ratio == best && basis_[(size_t)i] < basis_[(size_t)leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return 1;
            pivot(leave, enter);
        }
    }

    bool phase1() {
        in_phase1_ = true;
        compute_zrow(true);
        int r = iterate(true);
        if (r == 2) return false; // treated as infeasible within budget; caller
                                  // sees TIME_LIMIT via budget check
        Rat v = phase1_value();
        return v == 0;
    }

    Rat phase1_value() const {
        Rat v(0);
        for (int i = 0; i < m_; ++i)
            if (basis_[(size_t)i] >= art0_) v += rhs_[(size_t)i];
        return v;
    }

    int phase2() {
        // drive artificials out of the basis where possible
        for (int i = 0; i < m_; ++i) {
            if (basis_[(size_t)i] < art0_) continue;
            for (int j = 0; j < lay_.ncols; ++j) {
                if (tab_[(size_t)i][(size_t)j] != 0) {
                    compute_zrow(true); // keep consistent; pivot updates it
                    pivot(i, j);
                    break;
                }
            }
        }
        in_phase1_ = false;
        compute_zrow(false);
        return iterate(false);
    }
};

struct NodeBounds {
    std::vector<BranchBound> bounds;
};

bool is_frac(const Rat& q) { return q.get_den() != 1; }

// Value of the branch entity for a variable under witness x.
Rat entity_value(const OptProblem& p, int v, const std::vector<Rat>& x) {
    if (p.variable(v).parity)
        return (x[(size_t)v] - *p.variable(v).parity) / 2;
    return x[(size_t)v];
}

bool entity_integral(const OptProblem& p, int v, const std::vector<Rat>& x) {
    return is_integer(entity_value(p, v, x));
}

} // namespace

static OptResult lp_once(OptProblem& work, const std::vector<BranchBound>& bb,
                         Budget& budget, const SolveControls& ctl) {
    // pricing loop: solve, ask source for columns, repeat until none
    while (true) {
        Simplex sx(work, bb, budget);
        SolveStatus st = sx.run();
        if (budget.exhausted()) {
            OptResult r;
            r.status = SolveStatus::TIME_LIMIT;
            r.value = 0;
            r.dual_bound = 0;
            return r;
        }
        OptResult r;
        r.status = st;
        if (st != SolveStatus::OPTIMAL) return r;
        r.value = sx.objective_value();
        r.witness = sx.witness();
        r.dual_bound = r.value;
        if (!ctl.source) return r;
        auto duals = sx.duals();
        auto cols = ctl.source->price(work, duals);
        if (cols.empty()) return r;
        std::map<int64_t, int> fresh_rows;
        for (auto& pc : cols) {
            int v = work.add_variable(pc.cost_abs, pc.integral);
            ctl.source->bind_column(pc.key, v);
            if (pc.parity) work.set_parity(v, *pc.parity);
            if (pc.lower || pc.upper) work.set_bounds(v, pc.lower, pc.upper);
            for (auto& [ci, q] : pc.rows) work.add_term(ci, v, q);
            for (auto& [key, q] : pc.fresh) {
                auto it = fresh_rows.find(key);
                int ci;
                if (it == fresh_rows.end()) {
                    ci = work.add_constraint({}, Rat(0));
                    fresh_rows.emplace(key, ci);
                    ctl.source->bind_row(key, ci);
                } else {
                    ci = it->second;
                }
                work.add_term(ci, v, q);
            }
        }
    }
}

static Budget make_budget(const SolveControls& ctl) {
    Budget b;
    b.unlimited = ctl.max_pivots <= 0;
    b.pivots_left = ctl.max_pivots;
    b.has_deadline = ctl.time_limit_ms > 0;
    if (b.has_deadline)
        b.deadline = std::chrono::steady_clock::now() +
                     std::chrono::milliseconds(ctl.time_limit_ms);
    return b;
}

OptResult solve_lp(const OptProblem& p, const SolveControls& ctl) {
    OptProblem work = p;
    Budget budget = make_budget(ctl);
    return lp_once(work, {}, budget, ctl);
}

OptResult solve_ilp(const OptProblem& p, const SolveControls& ctl) {
    OptProblem work = p;
    Budget budget = make_budget(ctl);

    struct Node {
        NodeBounds nb;
        Rat bound;     // parent LP bound (for reporting)
        bool has_bound = false;
    };
    std::vector<Node> stack;
    stack.push_back({});

    bool have_inc = false;
    OptResult incumbent;
    Rat best_open_bound;
    bool have_open_bound = false;
    bool hit_limit = false;

    while (!stack.empty()) {
        if (budget.exhausted()) { hit_limit = true; break; }
        Node node = std::move(stack.back());
        stack.pop_back();
        // With lazy columns a parent bound is stale (new columns can lower
        // descendants), so only prune on it for fixed column sets.
        if (!ctl.source && have_inc && node.has_bound &&
            node.bound >= incumbent.value)
            continue; // dominated
        OptResult rel = lp_once(work, node.nb.bounds, budget, ctl);
        if (rel.status == SolveStatus::TIME_LIMIT) { hit_limit = true; break; }
        if (rel.status == SolveStatus::INFEASIBLE) continue;
        if (rel.status == SolveStatus::UNBOUNDED) {
            if (stack.empty() && !have_inc && node.nb.bounds.empty()) {
                OptResult r;
                r.status = SolveStatus::UNBOUNDED;
                return r;
            }
            continue;
        }
        if (have_inc && rel.value >= incumbent.value) continue;
        // find lowest-index fractional branch entity
        int frac = -1;
        for (int v = 0; v < work.num_variables(); ++v) {
            const auto& vv = work.variable(v);
            if (!vv.integral && !vv.parity) continue;
            if (!entity_integral(work, v, rel.witness)) { frac = v; break; }
        }
        if (frac < 0) {
            // integral solution
            if (!have_inc || rel.value < incumbent.value) {
                incumbent = rel;
                have_inc = true;
            }
            continue;
        }
        Rat ev = entity_value(work, frac, rel.witness);
        Int fl = floor_int(ev);
        bool on_w = work.variable(frac).parity.has_value();
        Node lo, hi;
        lo.nb = node.nb;
        hi.nb = node.nb;
        lo.nb.bounds.push_back({frac, on_w, true, Rat(fl)});
        hi.nb.bounds.push_back({frac, on_w, false, Rat(fl + 1)});
        lo.bound = hi.bound = rel.value;
        lo.has_bound = hi.has_bound = true;
        stack.push_back(std::move(hi));
        stack.push_back(std::move(lo)); // floor child explored first
    }

    if (hit_limit) {
        OptResult r;
        r.status = SolveStatus::TIME_LIMIT;
        if (have_inc) {
            r.value = incumbent.value;
            r.witness = incumbent.witness;
        }
        if (ctl.source) {
            // stale node bounds are not valid once columns grew; costs are
            // nonnegative, so 0 is the safe certified bound
            r.dual_bound = 0;
        } else {
            for (auto& n : stack)
                if (n.has_bound &&
                    (!have_open_bound || n.bound < best_open_bound)) {
                    best_open_bound = n.bound;
                    have_open_bound = true;
                }
            r.dual_bound = have_open_bound
                               ? best_open_bound
                               : (have_inc ? incumbent.value : Rat(0));
        }
        return r;
    }
    if (!have_inc) {
        OptResult r;
        r.status = SolveStatus::INFEASIBLE;
        return r;
    }
    incumbent.status = SolveStatus::OPTIMAL;
    incumbent.dual_bound = incumbent.value;
    return incumbent;
}

} // namespace fillvol
