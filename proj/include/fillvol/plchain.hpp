// Piecewise-linear chains with exact rational vertices: the computational
// surrogate for Lipschitz chains. Exact boundary algebra, squared-volume
// mass with certified interval square roots, halfspace clipping, prisms and
// cones for homotopy bookkeeping.
#ifndef FILLVOL_PLCHAIN_HPP
#define FILLVOL_PLCHAIN_HPP

#include "fillvol/chain.hpp"
#include "fillvol/rational.hpp"

#include <optional>
#include <vector>

namespace fillvol {

using Point = std::vector<Rat>;

// A d-simplex as an ordered (d+1)-tuple of points; order carries orientation.
struct PLSimplex {
    std::vector<Point> verts;
    int dim() const { return (int)verts.size() - 1; }
    int ambient() const { return verts.empty() ? 0 : (int)verts[0].size(); }
};

struct PLTerm {
    PLSimplex simplex;
    Int coeff;
};

struct PLChain {
    int dim = 0;
    int ambient = 0;
    std::vector<PLTerm> terms;

    bool is_zero() const { return terms.empty(); }
    void add(PLSimplex s, Int c);
    PLChain operator+(const PLChain& o) const;
    PLChain operator-(const PLChain& o) const;
    PLChain operator*(const Int& k) const;
};

PLChain pl_boundary(const PLChain& c);

// Exact squared d-volume times (d!)^2: det of the Gram matrix of edge
// vectors. Zero iff the simplex is degenerate.
Rat gram_det(const PLSimplex& s);
// Squared d-volume (gram_det / (d!)^2), exact.
Rat sq_volume(const PLSimplex& s);
bool is_degenerate(const PLSimplex& s);

// Certified enclosure of a sum of square roots of exact rationals.
struct MassInterval {
    Rat lo, hi;
    MassInterval() : lo(0), hi(0) {}
    MassInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {}
    MassInterval& operator+=(const MassInterval& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    double mid() const { return (lo.get_d() + hi.get_d()) / 2; }
};

// sqrt enclosure with relative width 2^-prec_bits.
MassInterval sqrt_interval(const Rat& x, int prec_bits = 48);
MassInterval pl_mass(const PLChain& c, int prec_bits = 48);

// Drops exact-zero-volume simplices (flat-equivalent normalization used
// throughout the deformation pipeline; dropped content is flat-null).
PLChain drop_degenerate(const PLChain& c);

// Splits simplex*coeff by the hyperplane x[axis] = value into the two closed
// sides; pieces partition the simplex, orientations preserved.
struct SplitResult {
    std::vector<PLTerm> below; // x[axis] <= value
    std::vector<PLTerm> above; // x[axis] >= value
};
SplitResult split_by_axis_plane(const PLSimplex& s, const Int& coeff, int axis,
                                const Rat& value);

// Splits by a general hyperplane n.x = b.
SplitResult split_by_hyperplane(const PLSimplex& s, const Int& coeff,
                                const std::vector<Rat>& normal, const Rat& b);

// Staircase prism over a simplex with given vertex images:
// d(prism) = image - simplex - prism(boundary). Exact for any images.
PLChain staircase_prism(const PLSimplex& s, const Int& coeff,
                        const std::vector<Point>& images);

// Cone from an apex: d(cone(a, X)) = X - cone(a, dX).
PLChain cone_from(const Point& apex, const PLChain& base);

// Map a cellular chain into PL form (each cube triangulated by the standard
// permutation subdivision, orientation matching the cell's extent order).
PLChain to_pl(const Chain& c);

// Exact point-in-simplex (closed) test.
bool point_in_simplex(const Point& p, const PLSimplex& s);

// Bounding box of a chain.
struct PLBBox {
    Point lo, hi;
    bool empty = true;
    void include(const Point& p);
};
PLBBox pl_bbox(const PLChain& c);

} // namespace fillvol

#endif
