// Pseudo-orientations and nonorientability area: the general ILP, the
// dimension-0 and codimension-1 constructions, orientability testing, and
// the filling-halving step.
#ifndef FILLVOL_ORIENT_HPP
#define FILLVOL_ORIENT_HPP

#include "fillvol/chain.hpp"
#include "fillvol/exact_opt.hpp"

#include <optional>
#include <vector>

namespace fillvol {

// Integral cycle R with R = target (mod 2).
struct PseudoOrientation {
    Chain R;      // over Z
    Chain target; // over Z/2
    void validate() const; // throws if dR != 0 or mod2(R) != target
};

struct OrientabilityReport {
    bool orientable = false;
    bool pseudomanifold = false;
    // For orientable inputs: the signed cycle (coefficients +-1 on supp A).
    std::optional<Chain> witness;
    // For non-orientable pseudomanifolds: a closed cell walk whose sign
    // propagation is inconsistent.
    std::vector<GridCell> obstruction;
};

struct NoaResult {
    SolveStatus status = SolveStatus::INFEASIBLE;
    Rat value;
    PseudoOrientation orientation;
    bool certified_region = false;
    Rat dual_bound;
};

struct NoaOptions {
    int64_t dilate = 0;
    SolveControls controls;
};

// Nonorientability area: minimal mass of an integral cycle congruent to A
// mod 2. Orientable inputs short-circuit (value = mass A is forced).
NoaResult noa(const Chain& A, const NoaOptions& opt = {});

// Sign-propagation over shared (d-1)-faces for pseudomanifolds; ILP
// feasibility fallback otherwise.
OrientabilityReport is_orientable(const Chain& A);

// Splits a 1-chain U with even boundary dU = 2T into U+ and U- with
// dU± = T and mass U+ + mass U- = mass U, via closed-walk orientation of the
// odd-multiplicity edge multigraph. Returns (lighter, heavier).
std::pair<Chain, Chain> halve_dim0(const Chain& U);

// For a codimension-1 mod-2 cycle with bounded support: the orientation
// R = d(sum of enclosed N-cells), coefficients +-1, supp R = supp A.
// Inside/outside decided by axis-0 parity sweep in lexicographic cell order.
Chain orient_codim1(const Chain& A);

// U' = (U -+ R)/2 for dU = 2T and R a pseudo-orientation of U mod 2; returns
// the lighter of the two halvings. dU' = T.
Chain halve_filling(const Chain& U, const PseudoOrientation& R);

} // namespace fillvol

#endif
