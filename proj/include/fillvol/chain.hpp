// Sparse cellular chains over Z, Z/2, Q with boundary, mass, restriction,
// mod-2 reduction, prisms and norms.
#ifndef FILLVOL_CHAIN_HPP
#define FILLVOL_CHAIN_HPP

#include "fillvol/grid.hpp"
#include "fillvol/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace fillvol {

enum class Ring { INT, MOD2, RAT };

std::string ring_name(Ring r);

// Normalizes a coefficient for the ring: MOD2 reduces into {0,1}; INT
// rejects non-integers. Returns the stored value (0 means "drop").
Rat normalize_coeff(Ring ring, const Rat& c);

class Chain {
public:
    Chain() = default;
    Chain(Ring ring, GridScale scale, int dim)
        : ring_(ring), scale_(std::move(scale)), dim_(dim) {}

    Ring ring() const { return ring_; }
    const GridScale& scale() const { return scale_; }
    int dim() const { return dim_; }
    int ambient() const { return scale_.ambient_dim; }

    bool is_zero() const { return coeffs_.empty(); }
    size_t support_size() const { return coeffs_.size(); }
    const std::map<GridCell, Rat>& coeffs() const { return coeffs_; }

    Rat coeff(const GridCell& c) const;
    // Adds k*[cell]; ring-normalizes, erases zeros, checks dim/ambient.
    void add(const GridCell& cell, const Rat& k);
    void set(const GridCell& cell, const Rat& k);

    std::set<GridCell> support() const;

    Chain operator+(const Chain& o) const;
    Chain operator-(const Chain& o) const;
    Chain operator*(const Rat& k) const;
    Chain operator-() const;
    bool operator==(const Chain& o) const;

    void check_compatible(const Chain& o) const;

private:
    Ring ring_ = Ring::INT;
    GridScale scale_;
    int dim_ = 0;
    std::map<GridCell, Rat> coeffs_;
};

Chain boundary(const Chain& c);

Rat mass(const Chain& c);
Rat mass_region(const Chain& c, const std::set<GridCell>& cells);
Rat l1(const Chain& c);

Chain mod2(const Chain& c);
// Divides an all-even integral chain by 2; throws naming the first odd cell.
Chain lift_double(const Chain& c);

Chain restrict(const Chain& c, const std::set<GridCell>& cells);

// Clamp every cell into the lattice box [lo, hi] (coordinates in grid units).
// Cells collapsing to lower dimension vanish. Chain map; mass non-increasing.
// This is the retraction that certifies bounding-box regions.
Chain clamp_to_box(const Chain& c, const std::vector<int64_t>& lo,
                   const std::vector<int64_t>& hi);

// Exact rescaling: the same chain in the grid of scale r/factor.
Chain refine_chain(const Chain& c, int64_t factor);

// Bounding box of the support in grid units: {lo, hi} corner coordinates.
struct BBox {
    std::vector<int64_t> lo, hi;
    bool empty = true;
    void include(const GridCell& cell);
    void dilate(int64_t k);
};
BBox support_bbox(const Chain& c);

// T x [a,b] in R^(N+1), the product cell structure: each cell gains the last
// axis as an extra extent. Materialize produces the product chain whose
// boundary satisfies d(T x I) = T_b - T_a - (dT) x I.
struct PrismChain {
    Chain base;
    Rat a, b;
    // Product cells live at the base scale; [a,b] must be a whole number of
    // vertical cells (b-a divisible by the scale), with a on the lattice.
    Chain materialize() const;
    Chain top() const;    // T x {b} as a chain in R^(N+1)
    Chain bottom() const; // T x {a}
};

PrismChain prism(const Chain& c, const Rat& a, const Rat& b);

// Embeds a chain of tau_r in R^N as a chain in R^(N+1) at height z (in grid
// units of r).
Chain embed_at_height(const Chain& c, int64_t z);
// Inverse of embed_at_height: projection onto R^N of a chain whose cells all
// lack extent in the last axis; cells with vertical extent map to zero.
Chain project_drop_last(const Chain& c);

} // namespace fillvol

#endif
