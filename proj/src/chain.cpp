#include "fillvol/chain.hpp"

#include <sstream>
#include <stdexcept>

namespace fillvol {

std::string ring_name(Ring r) {
    switch (r) {
        case Ring::INT: return "Z";
        case Ring::MOD2: return "Z2";
        case Ring::RAT: return "Q";
    }
    return "?";
}

Rat normalize_coeff(Ring ring, const Rat& c) {
    switch (ring) {
        case Ring::RAT:
            return c;
        case Ring::INT:
            if (!is_integer(c))
                throw std::invalid_argument("non-integer coefficient in Z chain");
            return c;
        case Ring::MOD2: {
            if (!is_integer(c))
                throw std::invalid_argument("non-integer coefficient in Z/2 chain");
            Int m = c.get_num() % 2;
            return Rat(m < 0 ? m + 2 : m);
        }
    }
    return c;
}

Rat Chain::coeff(const GridCell& c) const {
    auto it = coeffs_.find(c);
    return it == coeffs_.end() ? Rat(0) : it->second;
}

void Chain::add(const GridCell& cell, const Rat& k) {
    if (cell.dim() != dim_)
        throw std::invalid_argument("cell dimension does not match chain");
    if (cell.ambient() != ambient())
        throw std::invalid_argument("cell ambient dim does not match chain");
    auto it = coeffs_.find(cell);
    Rat v = (it == coeffs_.end() ? Rat(0) : it->second) + k;
    v = normalize_coeff(ring_, v);
    if (v == 0) {
        if (it != coeffs_.end()) coeffs_.erase(it);
    } else if (it == coeffs_.end()) {
        coeffs_.emplace(cell, std::move(v));
    } else {
        it->second = std::move(v);
    }
}

void Chain::set(const GridCell& cell, const Rat& k) {
    coeffs_.erase(cell);
    add(cell, k);
}

std::set<GridCell> Chain::support() const {
    std::set<GridCell> s;
    for (auto& [c, v] : coeffs_) s.insert(c);
    return s;
}

void Chain::check_compatible(const Chain& o) const {
    if (!(scale_ == o.scale_) || dim_ != o.dim_ || ring_ != o.ring_)
        throw std::invalid_argument("chains have incompatible ring/scale/dim");
}

Chain Chain::operator+(const Chain& o) const {
    check_compatible(o);
    Chain r = *this;
    for (auto& [c, v] : o.coeffs_) r.add(c, v);
    return r;
}

Chain Chain::operator-(const Chain& o) const {
    check_compatible(o);
    Chain r = *this;
    for (auto& [c, v] : o.coeffs_) r.add(c, -v);
    return r;
}

Chain Chain::operator*(const Rat& k) const {
    Chain r(ring_, scale_, dim_);
    if (k == 0) return r;
    for (auto& [c, v] : coeffs_) r.add(c, v * k);
    return r;
}

Chain Chain::operator-() const { return (*this) * Rat(-1); }

bool Chain::operator==(const Chain& o) const {
    return ring_ == o.ring_ && scale_ == o.scale_ && dim_ == o.dim_ &&
           coeffs_ == o.coeffs_;
}

Chain boundary(const Chain& c) {
    if (c.dim() == 0)
        throw std::invalid_argument("boundary of a 0-chain");
    Chain out(c.ring(), c.scale(), c.dim() - 1);
    for (auto& [cell, v] : c.coeffs())
        for (auto& [face, sign] : cell_boundary(cell))
            out.add(face, v * sign);
    return out;
}

Rat mass(const Chain& c) {
    Rat vol = pow_rat(c.scale().side, (unsigned)c.dim());
    Rat m(0);
    for (auto& [cell, v] : c.coeffs()) m += abs_rat(v);
    return m * vol;
}

Rat mass_region(const Chain& c, const std::set<GridCell>& cells) {
    Rat vol = pow_rat(c.scale().side, (unsigned)c.dim());
    Rat m(0);
    for (auto& [cell, v] : c.coeffs())
        if (cells.count(cell)) m += abs_rat(v);
    return m * vol;
}

Rat l1(const Chain& c) {
    Rat m(0);
    for (auto& [cell, v] : c.coeffs()) m += abs_rat(v);
    return m;
}

Chain mod2(const Chain& c) {
    if (c.ring() == Ring::RAT)
        throw std::invalid_argument("mod2 of a rational chain");
    Chain out(Ring::MOD2, c.scale(), c.dim());
    for (auto& [cell, v] : c.coeffs()) out.add(cell, v);
    return out;
}

Chain lift_double(const Chain& c) {
    if (c.ring() != Ring::INT)
        throw std::invalid_argument("lift_double needs an integral chain");
    Chain out(Ring::INT, c.scale(), c.dim());
    for (auto& [cell, v] : c.coeffs()) {
        if (v.get_num() % 2 != 0) {
            std::ostringstream os;
            os << "odd coefficient " << v.get_str() << " at cell anchor(";
            for (size_t i = 0; i < cell.anchor.size(); ++i)
                os << (i ? "," : "") << cell.anchor[i];
            os << ")";
            throw std::invalid_argument(os.str());
        }
        out.add(cell, v / 2);
    }
    return out;
}

Chain restrict(const Chain& c, const std::set<GridCell>& cells) {
    Chain out(c.ring(), c.scale(), c.dim());
    for (auto& [cell, v] : c.coeffs())
        if (cells.count(cell)) out.add(cell, v);
    return out;
}

Chain clamp_to_box(const Chain& c, const std::vector<int64_t>& lo,
                   const std::vector<int64_t>& hi) {
    const int N = c.ambient();
    if ((int)lo.size() != N || (int)hi.size() != N)
        throw std::invalid_argument("clamp box dimension mismatch");
    Chain out(c.ring(), c.scale(), c.dim());
    for (auto& [cell, v] : c.coeffs()) {
        GridCell g = cell;
        bool dead = false;
        for (int i = 0; i < N && !dead; ++i) {
            int64_t a = g.anchor[(size_t)i];
            if (g.has_extent(i)) {
                // interval [a, a+1] must fit inside [lo_i, hi_i]
                if (a >= hi[(size_t)i] || a + 1 <= lo[(size_t)i]) dead = true;
            } else {
                if (a < lo[(size_t)i]) g.anchor[(size_t)i] = lo[(size_t)i];
                if (a > hi[(size_t)i]) g.anchor[(size_t)i] = hi[(size_t)i];
            }
        }
        if (!dead) out.add(g, v);
    }
    return out;
}

Chain refine_chain(const Chain& c, int64_t factor) {
    if (factor < 1) throw std::invalid_argument("refine factor must be >= 1");
    GridScale s(c.scale().side / factor, c.ambient());
    Chain out(c.ring(), s, c.dim());
    for (auto& [cell, v] : c.coeffs())
        for (auto& sub : refine_cell(cell, factor)) out.add(sub, v);
    return out;
}

void BBox::include(const GridCell& cell) {
    if (empty) {
        lo = cell.anchor;
        hi = cell.far_corner();
        empty = false;
        return;
    }
    auto far = cell.far_corner();
    for (size_t i = 0; i < lo.size(); ++i) {
        lo[i] = std::min(lo[i], cell.anchor[i]);
        hi[i] = std::max(hi[i], far[i]);
    }
}

void BBox::dilate(int64_t k) {
    for (size_t i = 0; i < lo.size(); ++i) {
        lo[i] -= k;
        hi[i] += k;
    }
}

BBox support_bbox(const Chain& c) {
    BBox b;
    for (auto& [cell, v] : c.coeffs()) b.include(cell);
    return b;
}

Chain embed_at_height(const Chain& c, int64_t z) {
    GridScale s(c.scale().side, c.ambient() + 1);
    Chain out(c.ring(), s, c.dim());
    for (auto& [cell, v] : c.coeffs()) {
        GridCell g = cell;
        g.anchor.push_back(z);
        out.add(g, v);
    }
    return out;
}

Chain project_drop_last(const Chain& c) {
    const int N = c.ambient();
    GridScale s(c.scale().side, N - 1);
    Chain out(c.ring(), s, c.dim());
    for (auto& [cell, v] : c.coeffs()) {
        if (cell.has_extent(N - 1)) continue; // vertical cells project to zero
        GridCell g = cell;
        g.anchor.pop_back();
        out.add(g, v);
    }
    return out;
}

Chain PrismChain::materialize() const {
    const Rat& r = base.scale().side;
    Rat za = a / r, zb = b / r;
    if (!is_integer(za) || !is_integer(zb) || !(a < b))
        throw std::invalid_argument("prism interval incompatible with scale");
    int64_t ia = to_long(za.get_num()), ib = to_long(zb.get_num());
    const int N = base.ambient();
    GridScale s(r, N + 1);
    Chain out(base.ring(), s, base.dim() + 1);
    // Interval-first product orientation: moving the vertical extent past the
    // d horizontal ones costs (-1)^d. This makes the boundary identity
    // d(T x [a,b]) = T x {b} - T x {a} - (dT) x [a,b] hold verbatim.
    Rat sign = (base.dim() % 2 == 0) ? Rat(1) : Rat(-1);
    for (auto& [cell, v] : base.coeffs()) {
        for (int64_t z = ia; z < ib; ++z) {
            GridCell g = cell;
            g.anchor.push_back(z);
            g.extents.push_back(N); // vertical axis is last, keeps sorted order
            out.add(g, v * sign);
        }
    }
    return out;
}

Chain PrismChain::top() const {
    Rat zb = b / base.scale().side;
    return embed_at_height(base, to_long(zb.get_num()));
}

Chain PrismChain::bottom() const {
    Rat za = a / base.scale().side;
    return embed_at_height(base, to_long(za.get_num()));
}

PrismChain prism(const Chain& c, const Rat& a, const Rat& b) {
    PrismChain p{c, a, b};
    const Rat& r = c.scale().side;
    if (!(a < b) || !is_integer(a / r) || !is_integer(b / r))
        throw std::invalid_argument("prism interval incompatible with scale");
    return p;
}

} // namespace fillvol
