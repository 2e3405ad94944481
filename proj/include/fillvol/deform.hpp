// Federer-Fleming deformation for PL chains: exact central projections from
// random cell centers, skeleton-by-skeleton cascade, cellularization by
// covering degree, and scale-to-scale coarsening. All chain identities are
// exact; discrepancies are returned as an explicitly certified flat-null
// residue.
#ifndef FILLVOL_DEFORM_HPP
#define FILLVOL_DEFORM_HPP

#include "fillvol/chain.hpp"
#include "fillvol/plchain.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace fillvol {

// Axis-aligned box cell, possibly degenerate along some axes (hi == lo).
struct BoxCell {
    std::vector<Rat> lo, hi;
    int dim() const;
    int ambient() const { return (int)lo.size(); }
    bool operator<(const BoxCell& o) const;
    bool operator==(const BoxCell& o) const { return lo == o.lo && hi == o.hi; }
    Rat volume() const; // product of extents over non-degenerate axes
};

// Cell structure seen by the cascade: a way to find the smallest cell
// containing a piece and the walls that split pieces spanning several cells.
class ComplexView {
public:
    virtual ~ComplexView() = default;
    virtual int ambient() const = 0;
    virtual int top_dim() const = 0;
    // A wall x[axis] = value with bb.lo[axis] < value < bb.hi[axis], if any.
    virtual std::optional<std::pair<int, Rat>> first_cut(const PLBBox& bb) const = 0;
    // Smallest closed cell containing the box (call when first_cut is empty).
    virtual BoxCell locate(const PLBBox& bb) const = 0;
};

// The uniform grid tau_r on R^N.
class GridView : public ComplexView {
public:
    explicit GridView(GridScale s) : scale_(std::move(s)) {}
    int ambient() const override { return scale_.ambient_dim; }
    int top_dim() const override { return scale_.ambient_dim; }
    std::optional<std::pair<int, Rat>> first_cut(const PLBBox& bb) const override;
    BoxCell locate(const PLBBox& bb) const override;
    const GridScale& scale() const { return scale_; }

private:
    GridScale scale_;
};

// One slab level: R^N x [0, c] cut into (N+1)-cubes of side c, with the
// bottom hyperplane subdivided at side c/2. Vertical axis is the last one.
class SlabView : public ComplexView {
public:
    SlabView(int n_horizontal, Rat coarse_side)
        : N_(n_horizontal), coarse_(std::move(coarse_side)) {}
    int ambient() const override { return N_ + 1; }
    int top_dim() const override { return N_ + 1; }
    std::optional<std::pair<int, Rat>> first_cut(const PLBBox& bb) const override;
    BoxCell locate(const PLBBox& bb) const override;
    Rat coarse() const { return coarse_; }
    Rat fine() const { return coarse_ / 2; }

private:
    int N_;
    Rat coarse_;
};

// Splits every simplex until each piece lies in a single closed cell.
std::vector<PLTerm> clip_to_cells(const PLChain& c, const ComplexView& view);

// Central projection of in-cell pieces from a center onto the cell boundary.
// Exact: pieces are decomposed by exit facet and mapped projectively.
struct ProjectionResult {
    std::vector<PLTerm> image;   // pieces on the cell boundary
    PLChain prism;               // homotopy tracks, dim = piece dim + 1
    PLChain q;                   // prisms over the pieces' boundary faces
};
ProjectionResult radial_project(const BoxCell& cell, const Point& center,
                                const Rat& eps,
                                const std::vector<PLTerm>& pieces);

struct CascadeOutput {
    std::vector<PLChain> final_chains; // per family member
    std::vector<PLChain> prisms;       // R accumulators (dim d_i + 1)
    std::vector<PLChain> q_chains;     // boundary-prism accumulators
    long long redraws = 0;
};

// Deforms a finite family of PL chains simultaneously with shared per-cell
// projection centers (seeded deterministically per cell); every member ends
// in the skeleton of its own dimension. Exact identity per member:
//   final = original + boundary(prism) + q.
CascadeOutput ff_cascade(const std::vector<PLChain>& family,
                         const ComplexView& view, uint64_t seed);

// Covering degrees of a PL d-chain lying in the d-skeleton.
std::vector<std::pair<BoxCell, Int>> cellularize_cells(const PLChain& c,
                                                       const ComplexView& view);
// Same, converted to a uniform-grid chain (all cells must be grid cubes).
Chain cellularize(const PLChain& c, const GridView& view);

// Recursive degree-vanishing test: certifies that a chain is flat-null
// (normalizes to zero after cellwise overlay).
bool is_flat_null(const PLChain& z, const ComplexView& view);

struct DeformationOutput {
    Chain p;             // cellular part at the grid scale
    Chain p_boundary;    // the operator applied to dT in the same run
    PLChain q;           // dim d, supported near supp dT; zero for cycles
    PLChain r;           // dim d+1 homotopy tracks
    PLChain residue;     // certified flat-null discrepancy
    uint64_t seed = 0;
    long long redraws = 0;
    // Thm-style measured ratios (upper bounds of certified intervals):
    // mass P/(mass T + r mass dT), mass Q/(r mass dT), mass R/(r mass T).
    std::optional<Rat> ratio_p, ratio_q, ratio_r;
};

// Federer-Fleming deformation of T into the grid of the given scale.
// T = P + Q + dR + residue holds exactly; residue is certified flat-null.
// Requires bounded support.
DeformationOutput deform_chain(const PLChain& t, const GridScale& scale,
                               uint64_t seed);

struct CoarsenOutput {
    Chain p;            // cellular at 2r
    Chain p_boundary;   // operator value on dT (cellular at 2r)
    PLChain h;          // homotopy with dH = embed(P) - T - H_boundary
    PLChain h_boundary; // boundary-prism part, zero when T is a cycle
    PLChain residue;    // certified flat-null
    uint64_t seed = 0;
};

// Coarsens a cellular chain from scale r to 2r through the deformation
// operator; naturality dP = coarsen(dT).P holds within the shared run.
CoarsenOutput coarsen(const Chain& t, uint64_t seed);

// Deterministic per-key random stream (splitmix64).
struct SeedStream {
    uint64_t state;
    explicit SeedStream(uint64_t s) : state(s) {}
    uint64_t next();
    // dyadic draw in [0,1) with 16 bits
    Rat unit16();
};
uint64_t mix_key(uint64_t seed, uint64_t a, uint64_t b);

} // namespace fillvol

#endif
