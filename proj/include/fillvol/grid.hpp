// Cubical grid complex: cells of the scaled lattice, boundary with signs,
// volumes, closed-cell neighborhoods, refinement.
#ifndef FILLVOL_GRID_HPP
#define FILLVOL_GRID_HPP

#include "fillvol/rational.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace fillvol {

// A cube of the lattice: integer minimum corner (in units of the grid scale)
// plus the strictly increasing list of axes along which it has extent 1.
struct GridCell {
    std::vector<int64_t> anchor;
    std::vector<int> extents;

    int dim() const { return (int)extents.size(); }
    int ambient() const { return (int)anchor.size(); }

    bool operator==(const GridCell& o) const {
        return anchor == o.anchor && extents == o.extents;
    }
    // Lexicographic order; fixes iteration order of every chain map.
    bool operator<(const GridCell& o) const {
        if (anchor != o.anchor) return anchor < o.anchor;
        return extents < o.extents;
    }

    bool has_extent(int axis) const;
    // Far corner: anchor + 1 on each extent axis.
    std::vector<int64_t> far_corner() const;
    void validate() const; // throws on malformed extents / axis range
};

struct GridScale {
    Rat side = Rat(1);
    int ambient_dim = 1;

    GridScale() = default;
    GridScale(Rat r, int n);
    bool operator==(const GridScale& o) const {
        return side == o.side && ambient_dim == o.ambient_dim;
    }
};

// Describes the product slab complex on R^N x [2^i, 2^(i+1)]: (N+1)-cubes of
// side 2^i with the bottom face subdivided at 2^(i-1). Materialized lazily.
struct SlabComplexDesc {
    int level = 1; // i >= 1
    Rat cube_side() const { return pow_rat(Rat(2), level); }
    Rat bottom_side() const { return pow_rat(Rat(2), level) / 2; }
    Rat bottom_height() const { return pow_rat(Rat(2), level); }
    Rat top_height() const { return pow_rat(Rat(2), level + 1); }
};

// Signed boundary faces. For extents e_1<...<e_d, dropping e_j gives the far
// face with sign (-1)^(j-1) and the near face with sign (-1)^j (1-based j).
std::vector<std::pair<GridCell, int>> cell_boundary(const GridCell& cell);

// r^dim for a cell at the given scale.
Rat cell_volume(const GridCell& cell, const GridScale& scale);

// Every closed top-dimensional cell of the grid whose closed point set meets
// the closed union of the input cells.
std::set<GridCell> nbhd(const std::set<GridCell>& cells, const GridScale& scale);

// The m^dim subcells tiling `cell` in the grid of scale r/m.
std::vector<GridCell> refine_cell(const GridCell& cell, int64_t factor);

// All dim-cells whose closed point set lies in the lattice box [lo, hi],
// in lexicographic (extents, anchor) order.
std::vector<GridCell> cells_in_lattice_box(const std::vector<int64_t>& lo,
                                           const std::vector<int64_t>& hi,
                                           int dim);

} // namespace fillvol

#endif
