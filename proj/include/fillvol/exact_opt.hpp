// Exact rational linear and integer programming: primal simplex with Bland's
// rule (two-phase), branch-and-bound over the LP relaxation, optimality
// certificates via exact duals. Supports |x| objectives (internal split),
// parity constraints v = a (mod 2), variable bounds, and lazy columns.
#ifndef FILLVOL_EXACT_OPT_HPP
#define FILLVOL_EXACT_OPT_HPP

#include "fillvol/rational.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fillvol {

enum class SolveStatus { OPTIMAL, INFEASIBLE, UNBOUNDED, TIME_LIMIT };

std::string status_name(SolveStatus s);

struct OptVariable {
    Rat cost;                 // objective weight on |x|, must be >= 0
    bool integral = false;
    std::optional<int> parity; // x = parity (mod 2); implies integral search
    std::optional<Rat> lower, upper;
};

struct LinTerm {
    int var;
    Rat coeff;
};

struct OptConstraint {
    std::vector<LinTerm> terms;
    Rat rhs;
};

class OptProblem {
public:
    int add_variable(Rat cost_abs, bool integral = false);
    void set_parity(int var, int parity_mod2);
    void set_bounds(int var, std::optional<Rat> lo, std::optional<Rat> hi);
    int add_constraint(std::vector<LinTerm> terms, Rat rhs);
    // Appends an entry to an existing constraint row (used by lazy columns).
    void add_term(int constraint, int var, Rat coeff);

    int num_variables() const { return (int)vars_.size(); }
    int num_constraints() const { return (int)cons_.size(); }
    const OptVariable& variable(int v) const { return vars_[(size_t)v]; }
    const OptConstraint& constraint(int c) const { return cons_[(size_t)c]; }

    // Plain-text dump (debugging aid); exact rationals as "p/q".
    std::string dump() const;

private:
    std::vector<OptVariable> vars_;
    std::vector<OptConstraint> cons_;
};

struct OptResult {
    SolveStatus status = SolveStatus::INFEASIBLE;
    Rat value;
    std::vector<Rat> witness; // per problem variable
    Rat dual_bound;           // exact lower bound, valid even on TIME_LIMIT
};

// Lazy column/row generation: given exact row duals (index = constraint id;
// rows added later have dual 0 implicitly), report new variables that price
// negatively.  Each new column may reference not-yet-existing rows through
// `new_rows` (rhs 0 constraints keyed by caller-chosen ids).
struct PricedColumn {
    int64_t key = 0; // caller identifier, reported back via bind_column
    Rat cost_abs;
    bool integral = false;
    std::optional<int> parity;
    std::optional<Rat> lower, upper;
    // entries against existing constraint ids and/or fresh row keys
    std::vector<std::pair<int, Rat>> rows;       // existing constraint index
    std::vector<std::pair<int64_t, Rat>> fresh;  // caller row key, coeff
};

class ColumnSource {
public:
    virtual ~ColumnSource() = default;
    // duals: one per existing constraint. Return columns with negative
    // reduced cost (cost - y.A strictly negative for one sign of the split);
    // empty result means the current LP is optimal over the full column set.
    virtual std::vector<PricedColumn> price(const OptProblem& p,
                                            const std::vector<Rat>& duals) = 0;
    // Called after a fresh row key materializes as a constraint index.
    virtual void bind_row(int64_t key, int constraint_index) = 0;
    // Called once per accepted column with its variable index.
    virtual void bind_column(int64_t key, int var_index) = 0;
};

struct SolveControls {
    // Deterministic work budget (simplex pivots across the whole solve);
    // <=0 means unlimited.
    long long max_pivots = -1;
    // Wall-clock budget in milliseconds; <=0 means unlimited. Runs that hit
    // it return TIME_LIMIT (values then carry incumbent + dual bound).
    long long time_limit_ms = -1;
    ColumnSource* source = nullptr;
};

OptResult solve_lp(const OptProblem& p, const SolveControls& ctl = {});
OptResult solve_ilp(const OptProblem& p, const SolveControls& ctl = {});

} // namespace fillvol

#endif
