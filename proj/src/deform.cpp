#include "fillvol/deform.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fillvol {

// ---------------------------------------------------------------- BoxCell

int BoxCell::dim() const {
    int d = 0;
    for (size_t i = 0; i < lo.size(); ++i)
        if (hi[i] > lo[i]) ++d;
    return d;
}

bool BoxCell::operator<(const BoxCell& o) const {
    if (lo != o.lo) return std::lexicographical_compare(
        lo.begin(), lo.end(), o.lo.begin(), o.lo.end());
    return std::lexicographical_compare(hi.begin(), hi.end(), o.hi.begin(),
                                        o.hi.end());
}

Rat BoxCell::volume() const {
    Rat v(1);
    for (size_t i = 0; i < lo.size(); ++i)
        if (hi[i] > lo[i]) v *= hi[i] - lo[i];
    return v;
}

// ---------------------------------------------------------------- views

std::optional<std::pair<int, Rat>> GridView::first_cut(const PLBBox& bb) const {
    const Rat& r = scale_.side;
    for (size_t ax = 0; ax < bb.lo.size(); ++ax) {
        if (bb.hi[ax] == bb.lo[ax]) continue;
        Rat v = Rat(floor_int(bb.lo[ax] / r) + 1) * r;
        if (bb.lo[ax] < v && v < bb.hi[ax]) return std::make_pair((int)ax, v);
    }
    return std::nullopt;
}

BoxCell GridView::locate(const PLBBox& bb) const {
    const Rat& r = scale_.side;
    BoxCell c;
    c.lo.resize(bb.lo.size());
    c.hi.resize(bb.lo.size());
    for (size_t ax = 0; ax < bb.lo.size(); ++ax) {
        if (bb.lo[ax] == bb.hi[ax] && is_integer(bb.lo[ax] / r)) {
            c.lo[ax] = c.hi[ax] = bb.lo[ax];
        } else {
            Rat base = Rat(floor_int(bb.lo[ax] / r)) * r;
            if (base == bb.lo[ax] && bb.hi[ax] == bb.lo[ax]) {
                c.lo[ax] = c.hi[ax] = base;
            } else {
                c.lo[ax] = base;
                c.hi[ax] = base + r;
                if (bb.hi[ax] > c.hi[ax])
                    throw std::logic_error("locate called on an uncut piece");
            }
        }
    }
    return c;
}

std::optional<std::pair<int, Rat>> SlabView::first_cut(const PLBBox& bb) const {
    const int vax = N_;
    // vertical walls at 0 and coarse
    if (bb.lo[(size_t)vax] < 0 && 0 < bb.hi[(size_t)vax])
        return std::make_pair(vax, Rat(0));
    if (bb.lo[(size_t)vax] < coarse_ && coarse_ < bb.hi[(size_t)vax])
        return std::make_pair(vax, coarse_);
    bool bottom = (bb.lo[(size_t)vax] == 0 && bb.hi[(size_t)vax] == 0);
    Rat step = bottom ? fine() : coarse_;
    for (int ax = 0; ax < N_; ++ax) {
        if (bb.hi[(size_t)ax] == bb.lo[(size_t)ax]) continue;
        Rat v = Rat(floor_int(bb.lo[(size_t)ax] / step) + 1) * step;
        if (bb.lo[(size_t)ax] < v && v < bb.hi[(size_t)ax])
            return std::make_pair(ax, v);
    }
    return std::nullopt;
}

BoxCell SlabView::locate(const PLBBox& bb) const {
    const int vax = N_;
    BoxCell c;
    c.lo.resize((size_t)N_ + 1);
    c.hi.resize((size_t)N_ + 1);
    bool bottom = (bb.lo[(size_t)vax] == 0 && bb.hi[(size_t)vax] == 0);
    bool top = (bb.lo[(size_t)vax] == coarse_ && bb.hi[(size_t)vax] == coarse_);
    if (bottom || top) {
        c.lo[(size_t)vax] = c.hi[(size_t)vax] = bottom ? Rat(0) : coarse_;
    } else {
        c.lo[(size_t)vax] = 0;
        c.hi[(size_t)vax] = coarse_;
    }
    Rat step = bottom ? fine() : coarse_;
    for (int ax = 0; ax < N_; ++ax) {
        if (bb.lo[(size_t)ax] == bb.hi[(size_t)ax] &&
            is_integer(bb.lo[(size_t)ax] / step)) {
            c.lo[(size_t)ax] = c.hi[(size_t)ax] = bb.lo[(size_t)ax];
        } else {
            Rat base = Rat(floor_int(bb.lo[(size_t)ax] / step)) * step;
            c.lo[(size_t)ax] = base;
            c.hi[(size_t)ax] = base + step;
            if (bb.hi[(size_t)ax] > c.hi[(size_t)ax])
                throw std::logic_error("slab locate on an uncut piece");
        }
    }
    return c;
}

// ------------------------------------------------------------ clipping

std::vector<PLTerm> clip_to_cells(const PLChain& c, const ComplexView& view) {
    std::vector<PLTerm> work;
    for (auto& t : c.terms)
        if (!is_degenerate(t.simplex)) work.push_back(t);
    std::vector<PLTerm> done;
    while (!work.empty()) {
        PLTerm t = std::move(work.back());
        work.pop_back();
        PLBBox bb;
        for (auto& v : t.simplex.verts) bb.include(v);
        auto cut = view.first_cut(bb);
        if (!cut) {
            done.push_back(std::move(t));
            continue;
        }
        SplitResult sr = split_by_axis_plane(t.simplex, t.coeff, cut->first,
                                             cut->second);
        for (auto& p : sr.below)
            if (!is_degenerate(p.simplex)) work.push_back(std::move(p));
        for (auto& p : sr.above)
            if (!is_degenerate(p.simplex)) work.push_back(std::move(p));
    }
    return done;
}

// --------------------------------------------------- canonical form

namespace {

// Sorts vertices lexicographically, tracking the permutation sign; merges
// identical simplices. Exact chain-preserving normal form.
PLChain canonicalize(const PLChain& c) {
    struct Key {
        std::vector<Point> verts;
        bool operator<(const Key& o) const { return verts < o.verts; }
    };
    std::map<Key, Int> acc;
    for (auto& t : c.terms) {
        std::vector<Point> vs = t.simplex.verts;
        // insertion sort with sign
        int sign = 1;
        for (size_t i = 1; i < vs.size(); ++i)
            for (size_t j = i; j > 0 && vs[j] < vs[j - 1]; --j) {
                std::swap(vs[j], vs[j - 1]);
                sign = -sign;
            }
        bool dup = false;
        for (size_t i = 1; i < vs.size(); ++i)
            if (vs[i] == vs[i - 1]) { dup = true; break; }
        if (dup) continue; // degenerate (repeated vertex)
        acc[Key{std::move(vs)}] += t.coeff * sign;
    }
    PLChain out;
    out.dim = c.dim;
    out.ambient = c.ambient;
    for (auto& [k, v] : acc) {
        if (v == 0) continue;
        PLSimplex s;
        s.verts = k.verts;
        out.terms.push_back(PLTerm{std::move(s), v});
    }
    return out;
}

struct RetriableCenter : std::runtime_error {
    RetriableCenter() : std::runtime_error("center hits the chain; redraw") {}
};

std::vector<PLTerm> clip_keep(const std::vector<PLTerm>& terms,
                              const std::vector<Rat>& normal, const Rat& b,
                              bool keep_ge, std::vector<PLTerm>* other) {
    std::vector<PLTerm> kept;
    for (auto& t : terms) {
        SplitResult sr = split_by_hyperplane(t.simplex, t.coeff, normal, b);
        auto& keep_list = keep_ge ? sr.above : sr.below;
        auto& rest_list = keep_ge ? sr.below : sr.above;
        for (auto& p : keep_list)
            if (!is_degenerate(p.simplex)) kept.push_back(std::move(p));
        if (other)
            for (auto& p : rest_list)
                if (!is_degenerate(p.simplex)) other->push_back(std::move(p));
    }
    return kept;
}

} // namespace

// ------------------------------------------------------- radial_project

ProjectionResult radial_project(const BoxCell& cell, const Point& center,
                                const Rat& eps, const std::vector<PLTerm>& pieces) {
    (void)eps;
    const int N = cell.ambient();
    std::vector<int> E;
    for (int i = 0; i < N; ++i)
        if (cell.hi[(size_t)i] > cell.lo[(size_t)i]) E.push_back(i);
    if (E.empty()) throw std::invalid_argument("projection in a vertex cell");

    for (auto& t : pieces)
        if (point_in_simplex(center, t.simplex)) throw RetriableCenter();

    ProjectionResult res;
    if (pieces.empty()) return res;
    int pdim = pieces[0].simplex.dim();
    res.prism.dim = pdim + 1;
    res.prism.ambient = N;
    res.q.dim = pdim;
    res.q.ambient = N;

    // facets in deterministic order: (axis asc, lo side then hi side)
    struct Facet {
        int axis;
        bool hi_side;
        Rat wall;
    };
    std::vector<Facet> facets;
    for (int a : E) {
        facets.push_back({a, false, cell.lo[(size_t)a]});
        facets.push_back({a, true, cell.hi[(size_t)a]});
    }

    std::vector<PLTerm> remaining = pieces;
    for (size_t fi = 0; fi < facets.size() && !remaining.empty(); ++fi) {
        const Facet& F = facets[fi];
        // cone(center, F) = intersection of halfspaces through the center and
        // the ridges of F; each other extent axis b contributes two.
        struct HS {
            std::vector<Rat> n;
            Rat b;
        };
        std::vector<HS> cone;
        {
            // first: the ray must point toward the facet wall
            std::vector<Rat> n((size_t)N, Rat(0));
            n[(size_t)F.axis] = F.hi_side ? Rat(1) : Rat(-1);
            Rat b0 = n[(size_t)F.axis] * center[(size_t)F.axis];
            cone.push_back({std::move(n), std::move(b0)});
        }
        for (int b : E) {
            if (b == F.axis) continue;
            for (int side = 0; side < 2; ++side) {
                Rat cb = side ? cell.hi[(size_t)b] : cell.lo[(size_t)b];
                std::vector<Rat> n((size_t)N, Rat(0));
                n[(size_t)F.axis] = cb - center[(size_t)b];
                n[(size_t)b] = -(F.wall - center[(size_t)F.axis]);
                Rat rhs(0);
                for (int i = 0; i < N; ++i) rhs += n[(size_t)i] * center[(size_t)i];
                // orient towards the facet midpoint
                Point m = center;
                m[(size_t)F.axis] = F.wall;
                m[(size_t)b] = (cell.lo[(size_t)b] + cell.hi[(size_t)b]) / 2;
                Rat at(0);
                for (int i = 0; i < N; ++i) at += n[(size_t)i] * m[(size_t)i];
                if (at == rhs) continue; // degenerate ridge (cb == center_b?)
                if (at < rhs) {
                    for (auto& q : n) q = -q;
                    rhs = -rhs;
                }
                cone.push_back({std::move(n), std::move(rhs)});
            }
        }
        // claim = remaining intersect cone; remainder = fan of complements
        std::vector<PLTerm> claim = remaining;
        std::vector<PLTerm> next_remaining;
        for (auto& hs : cone)
            claim = clip_keep(claim, hs.n, hs.b, true, &next_remaining);
        remaining.swap(next_remaining);
        if (claim.empty()) continue;

        // map each claimed piece projectively onto the facet
        const Rat ca = F.wall;
        for (auto& t : claim) {
            std::vector<Point> images;
            images.reserve(t.simplex.verts.size());
            bool singular = false;
            for (auto& v : t.simplex.verts) {
                Rat dv = v[(size_t)F.axis] - center[(size_t)F.axis];
                if (dv == 0) { singular = true; break; }
                Rat s = (ca - center[(size_t)F.axis]) / dv;
                Point img(v.size());
                for (size_t i = 0; i < v.size(); ++i)
                    img[i] = center[i] + s * (v[i] - center[i]);
                img[(size_t)F.axis] = ca; // exact by construction; force it
                images.push_back(std::move(img));
            }
            if (singular) throw RetriableCenter();
            PLSimplex im;
            im.verts = images;
            if (!is_degenerate(im)) res.image.push_back(PLTerm{im, t.coeff});
            // homotopy prism (kept even when the image is degenerate)
            res.prism = res.prism + staircase_prism(t.simplex, t.coeff, images);
            // q: prisms over the faces of the piece
            if (pdim >= 1) {
                for (size_t i = 0; i < t.simplex.verts.size(); ++i) {
                    PLSimplex f;
                    std::vector<Point> fim;
                    for (size_t j = 0; j < t.simplex.verts.size(); ++j) {
                        if (j == i) continue;
                        f.verts.push_back(t.simplex.verts[j]);
                        fim.push_back(images[j]);
                    }
                    Int sign = (i % 2 == 0) ? 1 : -1;
                    res.q = res.q + staircase_prism(f, t.coeff * sign, fim);
                }
            }
        }
    }
    if (!remaining.empty()) {
        // all nondegenerate pieces must exit through some facet
        for (auto& t : remaining)
            if (!is_degenerate(t.simplex))
                throw std::logic_error("projection left an unclaimed piece");
    }
    return res;
}

// ------------------------------------------------------------- seeding

uint64_t SeedStream::next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rat SeedStream::unit16() {
    uint64_t u = next() & 0xffffULL;
    return Rat((long)u, 65536L);
}

uint64_t mix_key(uint64_t seed, uint64_t a, uint64_t b) {
    SeedStream s(seed ^ (a * 0xd1342543de82ef95ULL) ^
                 (b * 0xaf251af3b0f025b5ULL));
    return s.next();
}

namespace {

uint64_t cell_key(const BoxCell& c) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mixrat = [&h](const Rat& q) {
        std::string s = q.get_str();
        for (char ch : s) h = (h ^ (uint64_t)(unsigned char)ch) * 0x100000001b3ULL;
    };
    for (auto& q : c.lo) mixrat(q);
    for (auto& q : c.hi) mixrat(q);
    return h;
}

Point draw_center(const BoxCell& cell, uint64_t seed, int draw_index) {
    SeedStream s(mix_key(seed, cell_key(cell), (uint64_t)draw_index));
    Point y(cell.lo.size());
    for (size_t i = 0; i < cell.lo.size(); ++i) {
        if (cell.hi[i] == cell.lo[i]) {
            y[i] = cell.lo[i];
        } else {
            Rat len = cell.hi[i] - cell.lo[i];
            y[i] = cell.lo[i] + len * (Rat(1, 4) + s.unit16() / 2);
        }
    }
    return y;
}

} // namespace

// ------------------------------------------------------------- cascade

CascadeOutput ff_cascade(const std::vector<PLChain>& family,
                         const ComplexView& view, uint64_t seed) {
    const size_t M = family.size();
    CascadeOutput out;
    out.final_chains.resize(M);
    out.prisms.resize(M);
    out.q_chains.resize(M);

    std::vector<std::vector<PLTerm>> work(M);
    for (size_t m = 0; m < M; ++m) {
        work[m] = clip_to_cells(family[m], view);
        out.final_chains[m].dim = family[m].dim;
        out.final_chains[m].ambient = family[m].ambient;
        out.prisms[m].dim = family[m].dim + 1;
        out.prisms[m].ambient = family[m].ambient;
        out.q_chains[m].dim = family[m].dim;
        out.q_chains[m].ambient = family[m].ambient;
    }

    for (int k = view.top_dim(); k >= 1; --k) {
        // bucket pieces of dim < k living in k-cells
        std::map<BoxCell, std::vector<std::vector<PLTerm>>> buckets;
        std::vector<std::vector<PLTerm>> keep(M);
        for (size_t m = 0; m < M; ++m) {
            for (auto& t : work[m]) {
                PLBBox bb;
                for (auto& v : t.simplex.verts) bb.include(v);
                BoxCell cell = view.locate(bb);
                if (cell.dim() == k && t.simplex.dim() < k) {
                    auto it = buckets.find(cell);
                    if (it == buckets.end())
                        it = buckets.emplace(cell,
                                             std::vector<std::vector<PLTerm>>(M))
                                 .first;
                    it->second[m].push_back(t);
                } else {
                    keep[m].push_back(t);
                }
            }
            work[m].swap(keep[m]);
            keep[m].clear();
        }
        for (auto& [cell, per_member] : buckets) {
            // panel of candidate centers, Markov-style acceptance
            const int PANEL = 4;
            struct Cand {
                Point y;
                std::vector<ProjectionResult> proj;
                std::vector<Rat> growth_hi; // per member
                bool valid = false;
            };
            std::vector<Cand> cands;
            int draw_index = 0;
            while ((int)cands.size() < PANEL && draw_index < 64) {
                Cand c;
                c.y = draw_center(cell, seed, draw_index++);
                try {
                    c.proj.resize(M);
                    c.growth_hi.assign(M, Rat(0));
                    for (size_t m = 0; m < M; ++m) {
                        if (per_member[m].empty()) continue;
                        c.proj[m] = radial_project(cell, c.y, Rat(0),
                                                   per_member[m]);
                        PLChain imc;
                        imc.dim = family[m].dim;
                        imc.ambient = family[m].ambient;
                        imc.terms = c.proj[m].image;
                        c.growth_hi[m] = pl_mass(imc, 32).hi;
                    }
                    c.valid = true;
                } catch (const RetriableCenter&) {
                    out.redraws++;
                    continue;
                }
                cands.push_back(std::move(c));
            }
            if (cands.empty())
                throw std::runtime_error("could not separate a projection center");
            // gamma = 4 * panel mean per member; take the first candidate
            // within gamma for all members, else the min-max one
            std::vector<Rat> gamma((size_t)M, Rat(0));
            for (size_t m = 0; m < M; ++m) {
                Rat acc(0);
                for (auto& c : cands) acc += c.growth_hi[m];
                gamma[m] = Rat(4) * acc / (long)cands.size();
            }
            int chosen = -1;
            for (size_t ci = 0; ci < cands.size(); ++ci) {
                bool ok = true;
                for (size_t m = 0; m < M; ++m)
                    if (cands[ci].growth_hi[m] > gamma[m]) { ok = false; break; }
                if (ok) { chosen = (int)ci; break; }
            }
            if (chosen < 0) chosen = 0;
            out.redraws += chosen;
            Cand& c = cands[(size_t)chosen];
            for (size_t m = 0; m < M; ++m) {
                if (per_member[m].empty()) continue;
                PLChain imc;
                imc.dim = family[m].dim;
                imc.ambient = family[m].ambient;
                imc.terms = c.proj[m].image;
                auto reclipped = clip_to_cells(imc, view);
                for (auto& t : reclipped) work[m].push_back(std::move(t));
                out.prisms[m] = out.prisms[m] + c.proj[m].prism;
                out.q_chains[m] = out.q_chains[m] + c.proj[m].q;
            }
        }
    }
    for (size_t m = 0; m < M; ++m) {
        out.final_chains[m].terms = std::move(work[m]);
        out.prisms[m] = canonicalize(drop_degenerate(out.prisms[m]));
        out.q_chains[m] = canonicalize(drop_degenerate(out.q_chains[m]));
        out.final_chains[m] = canonicalize(out.final_chains[m]);
    }
    return out;
}

// --------------------------------------------------------- cellularize

namespace {

// signed volume of a d-simplex inside a d-cell, relative to the ascending
// extent-axis orientation; exact rational (det / d!).
Rat signed_volume_in_cell(const PLSimplex& s, const BoxCell& cell) {
    std::vector<int> E;
    for (int i = 0; i < cell.ambient(); ++i)
        if (cell.hi[(size_t)i] > cell.lo[(size_t)i]) E.push_back(i);
    const int d = s.dim();
    if ((int)E.size() != d) throw std::logic_error("cell/piece dim mismatch");
    if (d == 0) return Rat(1);
    std::vector<std::vector<Rat>> m((size_t)d, std::vector<Rat>((size_t)d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m[(size_t)i][(size_t)j] = s.verts[(size_t)i + 1][(size_t)E[(size_t)j]] -
                                      s.verts[0][(size_t)E[(size_t)j]];
    // determinant
    Rat det(1);
    for (int col = 0; col < d; ++col) {
        int piv = -1;
        for (int r = col; r < d; ++r)
            if (m[(size_t)r][(size_t)col] != 0) { piv = r; break; }
        if (piv < 0) return Rat(0);
        if (piv != col) {
            std::swap(m[(size_t)piv], m[(size_t)col]);
            det = -det;
        }
        det *= m[(size_t)col][(size_t)col];
        Rat inv = 1 / m[(size_t)col][(size_t)col];
        for (int r = col + 1; r < d; ++r) {
            if (m[(size_t)r][(size_t)col] == 0) continue;
            Rat f = m[(size_t)r][(size_t)col] * inv;
            for (int cc = col; cc < d; ++cc)
                m[(size_t)r][(size_t)cc] -= f * m[(size_t)col][(size_t)cc];
        }
    }
    Rat fact(1);
    for (int i = 2; i <= d; ++i) fact *= i;
    return det / fact;
}

} // namespace

std::vector<std::pair<BoxCell, Int>> cellularize_cells(const PLChain& c,
                                                       const ComplexView& view) {
    std::map<BoxCell, Rat> acc;
    auto terms = clip_to_cells(c, view);
    for (auto& t : terms) {
        if (is_degenerate(t.simplex)) continue;
        PLBBox bb;
        for (auto& v : t.simplex.verts) bb.include(v);
        BoxCell cell = view.locate(bb);
        if (cell.dim() != c.dim)
            throw std::runtime_error("support leaks outside the skeleton");
        acc[cell] += Rat(t.coeff) * signed_volume_in_cell(t.simplex, cell);
    }
    std::vector<std::pair<BoxCell, Int>> out;
    for (auto& [cell, v] : acc) {
        Rat deg = v / cell.volume();
        if (deg == 0) continue;
        if (!is_integer(deg))
            throw std::runtime_error("non-integer covering degree");
        out.push_back({cell, deg.get_num()});
    }
    return out;
}

Chain cellularize(const PLChain& c, const GridView& view) {
    Chain out(Ring::INT, view.scale(), c.dim);
    const Rat& r = view.scale().side;
    for (auto& [cell, deg] : cellularize_cells(c, view)) {
        GridCell g;
        g.anchor.resize(cell.lo.size());
        for (size_t i = 0; i < cell.lo.size(); ++i) {
            Rat a = cell.lo[i] / r;
            if (!is_integer(a))
                throw std::logic_error("cellularize: cell not grid aligned");
            g.anchor[i] = to_long(a.get_num());
            if (cell.hi[i] > cell.lo[i]) g.extents.push_back((int)i);
        }
        out.add(g, Rat(deg));
    }
    return out;
}

bool is_flat_null(const PLChain& z, const ComplexView& view) {
    PLChain cur = canonicalize(drop_degenerate(z));
    for (int dim = cur.dim; ; --dim) {
        if (cur.terms.empty()) return true;
        auto terms = clip_to_cells(cur, view);
        std::map<BoxCell, Rat> acc;
        for (auto& t : terms) {
            if (is_degenerate(t.simplex)) continue;
            PLBBox bb;
            for (auto& v : t.simplex.verts) bb.include(v);
            BoxCell cell = view.locate(bb);
            if (cell.dim() > dim) return false; // real mass off the skeleton
            if (cell.dim() < dim) continue;      // degenerate here
            acc[cell] += Rat(t.coeff) * signed_volume_in_cell(t.simplex, cell);
        }
        for (auto& [cell, v] : acc)
            if (v != 0) return false;
        if (dim == 0) return true;
        cur = canonicalize(drop_degenerate(pl_boundary(cur)));
        if (cur.dim != dim - 1) cur.dim = dim - 1;
    }
}

// ------------------------------------------------------- deform_chain

DeformationOutput deform_chain(const PLChain& t, const GridScale& scale,
                               uint64_t seed) {
    GridView view(scale);
    std::vector<PLChain> family{t};
    bool has_bd = t.dim >= 1;
    if (has_bd) family.push_back(canonicalize(drop_degenerate(pl_boundary(t))));

    CascadeOutput cas = ff_cascade(family, view, seed);

    DeformationOutput out;
    out.seed = seed;
    out.redraws = cas.redraws;
    out.p = cellularize(cas.final_chains[0], view);
    if (has_bd) {
        out.p_boundary = cellularize(cas.final_chains[1], view);
        if (out.p.dim() >= 1 && !(boundary(out.p) == out.p_boundary))
            throw std::logic_error("deformation naturality violated");
    } else {
        out.p_boundary = Chain(Ring::INT, scale, 0);
    }
    // final = T + d(R_acc) + Q_acc, so T = P + (-Q_acc) + d(-R_acc) + residue
    out.r = cas.prisms[0] * Int(-1);
    out.q = cas.q_chains[0] * Int(-1);
    // residue: final - P (flat-null by construction; certified)
    PLChain z = cas.final_chains[0] - to_pl(out.p);
    out.residue = canonicalize(drop_degenerate(z));
    if (!is_flat_null(out.residue, view))
        throw std::logic_error("deformation residue is not flat-null");

    // measured Thm-style ratios (interval upper bounds)
    MassInterval mt = pl_mass(t);
    MassInterval mp(mass(out.p), mass(out.p));
    std::optional<MassInterval> mbt;
    if (has_bd) mbt = pl_mass(family[1]);
    Rat r = scale.side;
    Rat denom_p = mt.hi + (mbt ? r * mbt->hi : Rat(0));
    if (denom_p > 0) out.ratio_p = mp.hi / denom_p;
    if (mbt && mbt->lo > 0) out.ratio_q = pl_mass(out.q).hi / (r * mbt->lo);
    if (mt.lo > 0) out.ratio_r = pl_mass(out.r).hi / (r * mt.lo);
    return out;
}

CoarsenOutput coarsen(const Chain& t, uint64_t seed) {
    GridScale s2(t.scale().side * 2, t.ambient());
    GridView view(s2);
    PLChain tp = to_pl(t);
    std::vector<PLChain> family{tp};
    bool has_bd = t.dim() >= 1;
    if (has_bd) family.push_back(canonicalize(drop_degenerate(pl_boundary(tp))));
    CascadeOutput cas = ff_cascade(family, view, seed);
    CoarsenOutput out;
    out.seed = seed;
    out.p = cellularize(cas.final_chains[0], view);
    if (has_bd) {
        out.p_boundary = cellularize(cas.final_chains[1], view);
        if (out.p.dim() >= 1 && !(boundary(out.p) == out.p_boundary))
            throw std::logic_error("coarsen naturality violated");
    } else {
        out.p_boundary = Chain(Ring::INT, s2, 0);
    }
    out.h = cas.prisms[0];
    out.h_boundary = cas.q_chains[0];
    PLChain z = cas.final_chains[0] - to_pl(out.p);
    out.residue = canonicalize(drop_degenerate(z));
    if (!is_flat_null(out.residue, view))
        throw std::logic_error("coarsen residue is not flat-null");
    return out;
}

} // namespace fillvol
