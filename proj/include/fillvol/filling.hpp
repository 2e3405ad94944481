// Filling volume FV_K(T) and flat norm over Z, Z/2, Q, as exact programs
// over candidate cell regions with global-optimality certification.
#ifndef FILLVOL_FILLING_HPP
#define FILLVOL_FILLING_HPP

#include "fillvol/chain.hpp"
#include "fillvol/exact_opt.hpp"

#include <set>

namespace fillvol {

struct FillingResult {
    SolveStatus status = SolveStatus::INFEASIBLE;
    Rat value;
    Chain witness;
    Ring ring = Ring::INT;
    std::set<GridCell> region_used;
    bool certified = false;
    Rat dual_bound;
};

// All (dim T + 1)-cells whose closed point set lies inside the bounding box
// of supp T dilated by k grid units. Coordinate clamping onto the box is a
// mass-nonincreasing chain retraction fixing T, so any fixed-grid filling can
// be moved into the box: optimality over the region certifies optimality
// over the whole grid (any k >= 0).
std::set<GridCell> candidate_region(const Chain& T, int64_t dilate);

struct FvOptions {
    int64_t dilate = 0;
    SolveControls controls;
    // Use lazy column generation when the region exceeds this many cells.
    size_t lazy_threshold = 400;
};

// Minimal-mass U with boundary(U) = T over the ring. T must be a cycle.
FillingResult fv(const Chain& T, Ring ring, const FvOptions& opt = {});

// FV over half-integers: exactly fv(2T, Z)/2; witness coefficients in (1/2)Z
// (returned as a rational chain).
FillingResult fv_half_integral(const Chain& T, const FvOptions& opt = {});

struct FlatNormResult {
    SolveStatus status = SolveStatus::INFEASIBLE;
    Rat value;
    Chain B;         // (d+1)-chain
    Chain remainder; // A - boundary(B)
    Rat dual_bound;
};

// inf_B mass B + mass(A - dB); A need not be a cycle.
FlatNormResult flat_norm(const Chain& A, Ring ring, const FvOptions& opt = {});

} // namespace fillvol

#endif
