#include "fillvol/filling.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fillvol {

namespace {

// Shared problem-building for fv (vars = region cells) with optional lazy
// column generation over the remaining region.
struct FvBuilder : ColumnSource {
    const Chain& T;
    Ring ring;
    Rat cell_vol;
    std::map<GridCell, int> var_of_cell;   // active cells
    std::vector<GridCell> cell_of_var;
    std::map<GridCell, int> row_of_face;   // active faces
    std::vector<GridCell> face_of_row;
    std::vector<GridCell> lazy_pool;       // region cells not yet active
    std::map<GridCell, int64_t> key_of_face;
    std::vector<GridCell> face_of_key;
    std::map<GridCell, int> y_of_face;     // MOD2 parity slack vars per row

    OptProblem prob;

    FvBuilder(const Chain& t, Ring r) : T(t), ring(r) {
        cell_vol = pow_rat(t.scale().side, (unsigned)(t.dim() + 1));
    }

    int face_row(const GridCell& f) {
        auto it = row_of_face.find(f);
        if (it != row_of_face.end()) return it->second;
        Rat rhs = T.coeff(f);
        if (ring == Ring::MOD2) rhs = normalize_coeff(Ring::MOD2, rhs);
        int row = prob.add_constraint({}, rhs);
        row_of_face.emplace(f, row);
        face_of_row.push_back(f);
        if (ring == Ring::MOD2) {
            // dU = T (mod 2): add -2y to the row with y free integral
            int y = prob.add_variable(Rat(0), true);
            prob.add_term(row, y, Rat(-2));
            y_of_face.emplace(f, y);
        }
        return row;
    }

    int add_cell(const GridCell& c) {
        int v = prob.add_variable(cell_vol, ring != Ring::RAT);
        var_of_cell.emplace(c, v);
        cell_of_var.resize((size_t)v + 1);
        cell_of_var[(size_t)v] = c;
        if (ring == Ring::MOD2) prob.set_bounds(v, Rat(0), Rat(1));
        for (auto& [f, s] : cell_boundary(c))
            prob.add_term(face_row(f), v, Rat(s));
        return v;
    }

    // --- lazy interface ---
    std::vector<PricedColumn> price(const OptProblem& p,
                                    const std::vector<Rat>& duals) override {
        std::vector<PricedColumn> out;
        std::vector<GridCell> still;
        for (auto& c : lazy_pool) {
            Rat ya(0);
            auto faces = cell_boundary(c);
            for (auto& [f, s] : faces) {
                auto it = row_of_face.find(f);
                if (it != row_of_face.end() && (size_t)it->second < duals.size())
                    ya += duals[(size_t)it->second] * s;
            }
            // reduced costs of the +/- split: vol -+ y.a
            if (cell_vol - ya < 0 || cell_vol + ya < 0) {
                PricedColumn pc;
                pc.key = (int64_t)out.size(); // rebound below
                pc.cost_abs = cell_vol;
                pc.integral = (ring != Ring::RAT);
                if (ring == Ring::MOD2) {
                    pc.lower = Rat(0);
                    pc.upper = Rat(1);
                }
                for (auto& [f, s] : faces) {
                    auto it = row_of_face.find(f);
                    if (it != row_of_face.end()) {
                        pc.rows.push_back({it->second, Rat(s)});
                    } else {
                        auto kit = key_of_face.find(f);
                        int64_t key;
                        if (kit == key_of_face.end()) {
                            key = (int64_t)face_of_key.size();
                            key_of_face.emplace(f, key);
                            face_of_key.push_back(f);
                        } else {
                            key = kit->second;
                        }
                        pc.fresh.push_back({key, Rat(s)});
                    }
                }
                pending_cols.push_back(c);
                pc.key = (int64_t)pending_cols.size() - 1;
                out.push_back(std::move(pc));
            } else {
                still.push_back(c);
            }
        }
        lazy_pool.swap(still);
        return out;
    }

    void bind_row(int64_t key, int constraint_index) override {
        const GridCell& f = face_of_key.at((size_t)key);
        row_of_face.emplace(f, constraint_index);
        face_of_row.resize((size_t)constraint_index + 1);
        face_of_row[(size_t)constraint_index] = f;
        // note: fresh rows created through pricing always have rhs 0, which
        // matches: faces meeting supp T are pre-activated in build().
    }

    void bind_column(int64_t key, int var_index) override {
        const GridCell& c = pending_cols.at((size_t)key);
        var_of_cell.emplace(c, var_index);
        cell_of_var.resize((size_t)var_index + 1);
        cell_of_var[(size_t)var_index] = c;
    }

    std::vector<GridCell> pending_cols;
};

Chain witness_chain(const FvBuilder& b, const std::vector<Rat>& xs,
                    Ring out_ring) {
    Chain w(out_ring, b.T.scale(), b.T.dim() + 1);
    for (auto& [cell, v] : b.var_of_cell) {
        if ((size_t)v < xs.size() && xs[(size_t)v] != 0) w.add(cell, xs[(size_t)v]);
    }
    return w;
}

} // namespace

std::set<GridCell> candidate_region(const Chain& T, int64_t dilate) {
    if (T.is_zero())
        throw std::invalid_argument("candidate_region of the zero chain");
    if (dilate < 0) throw std::invalid_argument("dilate must be >= 0");
    BBox bb = support_bbox(T);
    bb.dilate(dilate);
    auto cells = cells_in_lattice_box(bb.lo, bb.hi, T.dim() + 1);
    return {cells.begin(), cells.end()};
}

FillingResult fv(const Chain& T, Ring ring, const FvOptions& opt) {
    FillingResult res;
    res.ring = ring;
    if (T.is_zero()) {
        res.status = SolveStatus::OPTIMAL;
        res.value = 0;
        res.witness = Chain(ring, T.scale(), T.dim() + 1);
        res.certified = true;
        res.dual_bound = 0;
        return res;
    }
    // verify cycle
    if (T.dim() > 0) {
        Chain bd = boundary(T);
        if (ring == Ring::MOD2) bd = mod2(bd);
        if (!bd.is_zero())
            throw std::invalid_argument("T is not a boundary-compatible cycle");
    }

    Chain Tn = T;
    if (ring == Ring::MOD2 && T.ring() != Ring::MOD2) Tn = mod2(T);

    FvBuilder b(Tn, ring);
    auto region = candidate_region(Tn, opt.dilate);
    res.region_used = region;

    // activate faces carrying T first so rhs is installed
    for (auto& [f, c] : Tn.coeffs()) b.face_row(f);

    bool lazy = region.size() > opt.lazy_threshold && ring != Ring::MOD2;
    std::set<GridCell> seed;
    if (lazy) {
        // start from cells incident to supp T
        for (auto& [f, c] : Tn.coeffs()) (void)f;
        for (auto& cell : region) {
            bool touches = false;
            for (auto& [f, s] : cell_boundary(cell))
                if (Tn.coeff(f) != 0) { touches = true; break; }
            if (touches) seed.insert(cell);
        }
        for (auto& cell : region)
            if (!seed.count(cell)) b.lazy_pool.push_back(cell);
        for (auto& cell : seed) b.add_cell(cell);
    } else {
        for (auto& cell : region) b.add_cell(cell);
    }

    SolveControls ctl = opt.controls;
    if (lazy) ctl.source = &b;
    OptResult r = (ring == Ring::RAT) ? solve_lp(b.prob, ctl)
                                      : solve_ilp(b.prob, ctl);
    res.status = r.status;
    res.dual_bound = r.dual_bound;
    if (r.status == SolveStatus::OPTIMAL || r.status == SolveStatus::TIME_LIMIT) {
        res.value = r.value;
        if (!r.witness.empty()) {
            res.witness = witness_chain(b, r.witness, ring);
            if (r.status == SolveStatus::OPTIMAL) {
                Chain check = boundary(res.witness);
                if (ring == Ring::MOD2) check = mod2(check);
                if (!(check == Tn))
                    throw std::logic_error("fv witness boundary mismatch");
            }
        }
        res.certified = (r.status == SolveStatus::OPTIMAL);
    }
    return res;
}

FillingResult fv_half_integral(const Chain& T, const FvOptions& opt) {
    if (T.ring() != Ring::INT)
        throw std::invalid_argument("fv_half_integral needs an integral chain");
    FillingResult r2 = fv(T * Rat(2), Ring::INT, opt);
    FillingResult out;
    out.ring = Ring::RAT;
    out.status = r2.status;
    out.value = r2.value / 2;
    out.dual_bound = r2.dual_bound / 2;
    out.region_used = std::move(r2.region_used);
    out.certified = r2.certified;
    if (!r2.witness.is_zero() || r2.status == SolveStatus::OPTIMAL) {
        Chain w(Ring::RAT, T.scale(), T.dim() + 1);
        for (auto& [c, v] : r2.witness.coeffs()) w.add(c, v / 2);
        out.witness = std::move(w);
    }
    return out;
}

FlatNormResult flat_norm(const Chain& A, Ring ring, const FvOptions& opt) {
    FlatNormResult res;
    if (A.is_zero()) {
        res.status = SolveStatus::OPTIMAL;
        res.value = 0;
        res.B = Chain(ring, A.scale(), A.dim() + 1);
        res.remainder = Chain(ring, A.scale(), A.dim());
        res.dual_bound = 0;
        return res;
    }
    Chain An = A;
    if (ring == Ring::MOD2 && A.ring() != Ring::MOD2) An = mod2(A);

    Rat vol_d = pow_rat(An.scale().side, (unsigned)An.dim());
    Rat vol_d1 = pow_rat(An.scale().side, (unsigned)(An.dim() + 1));

    auto region = candidate_region(An, opt.dilate);
    OptProblem prob;
    std::map<GridCell, int> uvar, tvar;
    std::map<GridCell, int> rows;
    std::map<GridCell, int> yvar;
    auto face_row = [&](const GridCell& f) {
        auto it = rows.find(f);
        if (it != rows.end()) return it->second;
        Rat rhs = An.coeff(f);
        int row = prob.add_constraint({}, rhs);
        rows.emplace(f, row);
        // remainder variable t_F (|t| costs vol_d)
        int t = prob.add_variable(vol_d, ring != Ring::RAT);
        if (ring == Ring::MOD2) prob.set_bounds(t, Rat(0), Rat(1));
        prob.add_term(row, t, Rat(1));
        tvar.emplace(f, t);
        if (ring == Ring::MOD2) {
            int y = prob.add_variable(Rat(0), true);
            prob.add_term(row, y, Rat(-2));
            yvar.emplace(f, y);
        }
        return row;
    };
    for (auto& [f, c] : An.coeffs()) face_row(f);
    for (auto& cell : region) {
        int u = prob.add_variable(vol_d1, ring != Ring::RAT);
        if (ring == Ring::MOD2) prob.set_bounds(u, Rat(0), Rat(1));
        uvar.emplace(cell, u);
        for (auto& [f, s] : cell_boundary(cell))
            prob.add_term(face_row(f), u, Rat(s));
    }
    OptResult r = (ring == Ring::RAT) ? solve_lp(prob, opt.controls)
                                      : solve_ilp(prob, opt.controls);
    res.status = r.status;
    res.dual_bound = r.dual_bound;
    if (r.status != SolveStatus::OPTIMAL && r.status != SolveStatus::TIME_LIMIT)
        return res;
    res.value = r.value;
    Chain B(ring, An.scale(), An.dim() + 1);
    for (auto& [c, v] : uvar)
        if ((size_t)v < r.witness.size() && r.witness[(size_t)v] != 0)
            B.add(c, r.witness[(size_t)v]);
    Chain rem(ring, An.scale(), An.dim());
    for (auto& [f, t] : tvar)
        if ((size_t)t < r.witness.size() && r.witness[(size_t)t] != 0)
            rem.add(f, r.witness[(size_t)t]);
    res.B = std::move(B);
    res.remainder = std::move(rem);
    if (r.status == SolveStatus::OPTIMAL && ring != Ring::MOD2) {
        Chain check = An - boundary(res.B);
        if (!(check == res.remainder))
            throw std::logic_error("flat_norm witness identity mismatch");
    }
    return res;
}

} // namespace fillvol
