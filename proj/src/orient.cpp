#include "fillvol/orient.hpp"
#include "fillvol/filling.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fillvol {

void PseudoOrientation::validate() const {
    if (R.dim() > 0 && !boundary(R).is_zero())
        throw std::logic_error("pseudo-orientation is not a cycle");
    if (!(mod2(R) == target))
        throw std::logic_error("pseudo-orientation has wrong mod-2 class");
}

namespace {} // namespace

OrientabilityReport is_orientable(const Chain& A_in) {
    Chain A = (A_in.ring() == Ring::MOD2) ? A_in : mod2(A_in);
    if (!A.is_zero() && A.dim() > 0 && !boundary(A).is_zero())
        throw std::invalid_argument("is_orientable needs a mod-2 cycle");
    OrientabilityReport rep;
    if (A.is_zero()) {
        rep.orientable = true;
        rep.pseudomanifold = true;
        rep.witness = Chain(Ring::INT, A.scale(), A.dim());
        return rep;
    }
    std::vector<GridCell> cells;
    for (auto& [c, v] : A.coeffs()) cells.push_back(c);
    std::map<GridCell, int> idx;
    for (size_t i = 0; i < cells.size(); ++i) idx.emplace(cells[i], (int)i);

    // face -> list of (cell index, incidence sign)
    std::map<GridCell, std::vector<std::pair<int, int>>> facemap;
    for (size_t i = 0; i < cells.size(); ++i)
        for (auto& [f, s] : cell_boundary(cells[i]))
            facemap[f].push_back({(int)i, s});
    bool pseudo = true;
    for (auto& [f, inc] : facemap)
        if (inc.size() != 2) { pseudo = false; break; }
    rep.pseudomanifold = pseudo;

    if (pseudo) {
        // Orientable iff signs can be chosen so induced face signs cancel:
        // sign_a * s_a + sign_b * s_b = 0. BFS sign propagation; on a
        // contradiction the tree path between the two endpoints plus the
        // contradicting adjacency is an orientation-reversing closed walk.
        std::vector<std::vector<std::pair<int, int>>> adj(cells.size());
        for (auto& [f, inc] : facemap) {
            int rel = (inc[0].second == inc[1].second) ? -1 : +1;
            adj[(size_t)inc[0].first].push_back({inc[1].first, rel});
            adj[(size_t)inc[1].first].push_back({inc[0].first, rel});
        }
        std::vector<int> sign(cells.size(), 0), parent(cells.size(), -1);
        bool contradiction = false;
        int bad_a = -1, bad_b = -1;
        for (size_t start = 0; start < cells.size() && !contradiction; ++start) {
            if (sign[start] != 0) continue;
            sign[start] = 1;
            std::vector<int> queue{(int)start};
            for (size_t qi = 0; qi < queue.size() && !contradiction; ++qi) {
                int c = queue[qi];
                for (auto& [d, rel] : adj[(size_t)c]) {
                    int want = sign[(size_t)c] * rel;
                    if (sign[(size_t)d] == 0) {
                        sign[(size_t)d] = want;
                        parent[(size_t)d] = c;
                        queue.push_back(d);
                    } else if (sign[(size_t)d] != want) {
                        contradiction = true;
                        bad_a = c;
                        bad_b = d;
                        break;
                    }
                }
            }
        }
        if (!contradiction) {
            rep.orientable = true;
            Chain w(Ring::INT, A.scale(), A.dim());
            for (size_t i = 0; i < cells.size(); ++i)
                w.add(cells[i], Rat(sign[i]));
            if (!boundary(w).is_zero())
                throw std::logic_error("sign propagation produced a non-cycle");
            rep.witness = std::move(w);
        } else {
            rep.orientable = false;
            // closed walk: a -> root ancestors, b -> root ancestors, trimmed
            // at the lowest common ancestor
            auto path_up = [&](int x) {
                std::vector<int> p;
                while (x != -1) { p.push_back(x); x = parent[(size_t)x]; }
                return p;
            };
            std::vector<int> pa = path_up(bad_a), pb = path_up(bad_b);
            std::vector<bool> ina(cells.size(), false);
            for (int x : pa) ina[(size_t)x] = true;
            int lca = -1;
            for (int x : pb)
                if (ina[(size_t)x]) { lca = x; break; }
            std::vector<GridCell> walk;
            for (int x : pa) {
                walk.push_back(cells[(size_t)x]);
                if (x == lca) break;
            }
            std::vector<GridCell> tail;
            for (int x : pb) {
                if (x == lca) break;
                tail.push_back(cells[(size_t)x]);
            }
            for (auto it = tail.rbegin(); it != tail.rend(); ++it)
                walk.push_back(*it);
            rep.obstruction = std::move(walk);
        }
        return rep;
    }

    // Non-pseudomanifold: ILP feasibility r in {+1,-1} on supp A, 0 outside.
    OptProblem prob;
    std::map<GridCell, int> var;
    for (auto& c : cells) {
        int v = prob.add_variable(Rat(1), true);
        prob.set_parity(v, 1);
        prob.set_bounds(v, Rat(-1), Rat(1));
        var.emplace(c, v);
    }
    std::map<GridCell, int> rows;
    for (auto& c : cells)
        for (auto& [f, s] : cell_boundary(c)) {
            auto it = rows.find(f);
            int row = (it == rows.end())
                          ? prob.add_constraint({}, Rat(0))
                          : it->second;
            if (it == rows.end()) rows.emplace(f, row);
            prob.add_term(row, var[c], Rat(s));
        }
    OptResult r = solve_ilp(prob);
    rep.orientable = (r.status == SolveStatus::OPTIMAL);
    if (rep.orientable) {
        Chain w(Ring::INT, A.scale(), A.dim());
        for (auto& [c, v] : var) w.add(c, r.witness[(size_t)v]);
        rep.witness = std::move(w);
    }
    return rep;
}

NoaResult noa(const Chain& A_in, const NoaOptions& opt) {
    Chain A = (A_in.ring() == Ring::MOD2) ? A_in : mod2(A_in);
    if (!A.is_zero() && A.dim() > 0 && !boundary(A).is_zero())
        throw std::invalid_argument("noa needs a mod-2 cycle");
    NoaResult res;
    if (A.is_zero()) {
        res.status = SolveStatus::OPTIMAL;
        res.value = 0;
        res.orientation.R = Chain(Ring::INT, A.scale(), A.dim());
        res.orientation.target = A;
        res.certified_region = true;
        res.dual_bound = 0;
        return res;
    }

    // Orientable fast path: mass A is a lower bound for any pseudo-
    // orientation (odd coefficients on supp A), and an orientation attains it.
    OrientabilityReport orep = is_orientable(A);
    if (orep.orientable) {
        res.status = SolveStatus::OPTIMAL;
        res.value = mass(A);
        res.orientation.R = *orep.witness;
        res.orientation.target = A;
        res.orientation.validate();
        res.certified_region = true;
        res.dual_bound = res.value;
        return res;
    }

    // General case: exact ILP over the dilated bounding box. Coordinate
    // clamping retracts any same-scale cellular pseudo-orientation into the
    // box, so the regional optimum is the global cellular optimum.
    BBox bb = support_bbox(A);
    bb.dilate(opt.dilate);

    OptProblem prob;
    Rat vol = pow_rat(A.scale().side, (unsigned)A.dim());
    std::map<GridCell, int> var;
    std::map<GridCell, int> rows;
    auto add_cell = [&](const GridCell& c, int parity) {
        int v = prob.add_variable(vol, true);
        prob.set_parity(v, parity);
        var.emplace(c, v);
        return v;
    };
    // enumerate region d-cells inside bb
    {
        auto cells = cells_in_lattice_box(bb.lo, bb.hi, A.dim());
        for (auto& c : cells) {
            int parity = (A.coeff(c) != 0) ? 1 : 0;
            add_cell(c, parity);
        }
    }
    // cycle constraints dR = 0 over every face of a region cell
    for (auto& [c, v] : var)
        for (auto& [f, s] : cell_boundary(c)) {
            auto it = rows.find(f);
            int row;
            if (it == rows.end()) {
                row = prob.add_constraint({}, Rat(0));
                rows.emplace(f, row);
            } else {
                row = it->second;
            }
            prob.add_term(row, v, Rat(s));
        }
    OptResult r = solve_ilp(prob, opt.controls);
    res.status = r.status;
    res.dual_bound = r.dual_bound;
    if (r.status == SolveStatus::OPTIMAL || r.status == SolveStatus::TIME_LIMIT) {
        res.value = r.value;
        Chain R(Ring::INT, A.scale(), A.dim());
        for (auto& [c, v] : var)
            if ((size_t)v < r.witness.size() && r.witness[(size_t)v] != 0)
                R.add(c, r.witness[(size_t)v]);
        res.orientation.R = std::move(R);
        res.orientation.target = A;
        if (r.status == SolveStatus::OPTIMAL) {
            res.orientation.validate();
            res.certified_region = true;
        }
    }
    return res;
}

std::pair<Chain, Chain> halve_dim0(const Chain& U) {
    if (U.ring() != Ring::INT || U.dim() != 1)
        throw std::invalid_argument("halve_dim0 needs an integral 1-chain");
    Chain bd = boundary(U);
    for (auto& [c, v] : bd.coeffs())
        if (v.get_num() % 2 != 0)
            throw std::invalid_argument("boundary of U has an odd coefficient");

    // Multigraph on the odd-coefficient edges (each taken once): every vertex
    // has even degree, so the edge set decomposes into closed walks. Walking
    // each circuit and orienting along the traversal yields a cycle R with
    // R = U (mod 2) and |r_e| = 1 <= |u_e|.
    std::map<GridCell, Rat> odd;
    for (auto& [e, v] : U.coeffs())
        if (v.get_num() % 2 != 0) odd.emplace(e, v);

    Chain R(Ring::INT, U.scale(), 1);
    if (!odd.empty()) {
        // vertex -> incident unused odd edges
        std::map<std::vector<int64_t>, std::vector<const GridCell*>> vmap;
        for (auto& [e, v] : odd) {
            vmap[e.anchor].push_back(&e);
            vmap[e.far_corner()].push_back(&e);
        }
        std::map<GridCell, bool> used;
        for (auto& [e, v] : odd) used[e] = false;
        for (auto& [e0, v0] : odd) {
            if (used[e0]) continue;
            // trace a closed walk from e0
            const GridCell* cur = &e0;
            std::vector<int64_t> at = e0.anchor; // enter at anchor, exit far
            while (true) {
                used[*cur] = true;
                // orient the edge along the traversal: entering at `at`
                bool forward = (at == cur->anchor);
                R.add(*cur, forward ? Rat(1) : Rat(-1));
                at = forward ? cur->far_corner() : cur->anchor;
                // find next unused odd edge at `at`
                const GridCell* next = nullptr;
                for (auto* cand : vmap[at])
                    if (!used[*cand]) { next = cand; break; }
                if (!next) break; // walk closed (even degrees guarantee it)
                cur = next;
            }
        }
    }
    if (!boundary(R).is_zero())
        throw std::logic_error("halve_dim0 walk orientation is not a cycle");
    Chain Up = lift_double(U + R), Un = lift_double(U - R);
    if (!(mass(Up) + mass(Un) == mass(U)))
        throw std::logic_error("halve_dim0 mass split violated");
    if (mass(Up) <= mass(Un)) return {Up, Un};
    return {Un, Up};
}

Chain orient_codim1(const Chain& A_in) {
    Chain A = (A_in.ring() == Ring::MOD2) ? A_in : mod2(A_in);
    const int N = A.ambient();
    if (A.dim() != N - 1)
        throw std::invalid_argument("orient_codim1 needs a codimension-1 chain");
    if (A.is_zero()) return Chain(Ring::INT, A.scale(), N - 1);
    if (!boundary(A).is_zero())
        throw std::invalid_argument("orient_codim1 needs a cycle");

    // Parity sweep along axis 0 in lexicographic order: an N-cell is inside
    // iff the count of supp-A facets crossed from the box edge is odd.
    BBox bb = support_bbox(A);
    bb.dilate(1);
    Chain B(Ring::INT, A.scale(), N);
    std::vector<int> all_axes((size_t)N);
    for (int i = 0; i < N; ++i) all_axes[(size_t)i] = i;

    std::vector<int64_t> a = bb.lo;
    // iterate cells ordered with axis 0 fastest so the sweep can carry parity
    std::vector<int64_t> rest = bb.lo;
    while (true) {
        // sweep along axis 0 for this row
        int parity = 0;
        for (int64_t x = bb.lo[0]; x < bb.hi[0]; ++x) {
            std::vector<int64_t> anch = rest;
            anch[0] = x;
            // crossing facet at x (normal axis 0)
            GridCell facet;
            facet.anchor = anch;
            facet.extents.clear();
            for (int i = 1; i < N; ++i) facet.extents.push_back(i);
            if (A.coeff(facet) != 0) parity ^= 1;
            if (parity) {
                GridCell cell;
                cell.anchor = anch;
                cell.extents = all_axes;
                B.add(cell, Rat(1));
            }
        }
        if (parity != 0)
            throw std::invalid_argument("orient_codim1: chain does not bound");
        int i = 1;
        for (; i < N; ++i) {
            if (rest[(size_t)i] < bb.hi[(size_t)i] - 1) { ++rest[(size_t)i]; break; }
            rest[(size_t)i] = bb.lo[(size_t)i];
        }
        if (i == N) break;
    }
    Chain R = boundary(B);
    if (!(mod2(R) == A))
        throw std::invalid_argument("orient_codim1: A is not a cycle mod 2");
    return R;
}

Chain halve_filling(const Chain& U, const PseudoOrientation& R) {
    if (U.ring() != Ring::INT)
        throw std::invalid_argument("halve_filling needs an integral chain");
    R.validate();
    if (!(mod2(U) == R.target))
        throw std::invalid_argument("pseudo-orientation targets a different class");
    Chain Um = lift_double(U - R.R);
    Chain Up = lift_double(U + R.R);
    return (mass(Um) <= mass(Up)) ? Um : Up;
}

} // namespace fillvol
