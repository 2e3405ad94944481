#include "fillvol/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace fillvol {

bool GridCell::has_extent(int axis) const {
    return std::binary_search(extents.begin(), extents.end(), axis);
}

std::vector<int64_t> GridCell::far_corner() const {
    std::vector<int64_t> c = anchor;
    for (int e : extents) c[(size_t)e] += 1;
    return c;
}

void GridCell::validate() const {
    for (size_t i = 0; i < extents.size(); ++i) {
        if (extents[i] < 0 || extents[i] >= ambient())
            throw std::invalid_argument("cell extent axis out of range");
        if (i > 0 && extents[i] <= extents[i - 1])
            throw std::invalid_argument("cell extents not strictly increasing");
    }
}

GridScale::GridScale(Rat r, int n) : side(std::move(r)), ambient_dim(n) {
    if (side <= 0) throw std::invalid_argument("grid scale must be positive");
    if (ambient_dim < 1) throw std::invalid_argument("ambient dim must be >= 1");
}

std::vector<std::pair<GridCell, int>> cell_boundary(const GridCell& cell) {
    if (cell.dim() == 0)
        throw std::invalid_argument("no boundary of a vertex");
    std::vector<std::pair<GridCell, int>> out;
    out.reserve(2 * (size_t)cell.dim());
    for (size_t j = 0; j < cell.extents.size(); ++j) {
        int axis = cell.extents[j];
        GridCell face;
        face.anchor = cell.anchor;
        face.extents = cell.extents;
        face.extents.erase(face.extents.begin() + (ptrdiff_t)j);
        int far_sign = (j % 2 == 0) ? +1 : -1; // (-1)^(j-1), 1-based j
        GridCell far = face;
        far.anchor[(size_t)axis] += 1;
        out.emplace_back(std::move(far), far_sign);
        out.emplace_back(std::move(face), -far_sign);
    }
    return out;
}

Rat cell_volume(const GridCell& cell, const GridScale& scale) {
    return pow_rat(scale.side, (unsigned)cell.dim());
}

std::set<GridCell> nbhd(const std::set<GridCell>& cells, const GridScale& scale) {
    std::set<GridCell> out;
    const int N = scale.ambient_dim;
    std::vector<int> all_axes(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) all_axes[(size_t)i] = i;
    for (const GridCell& c : cells) {
        // A top cell with anchor b meets closed(c) iff b_i in [a_i-1, a_i+ext_i].
        std::vector<int64_t> lo = c.anchor, hi = c.anchor;
        for (int i = 0; i < N; ++i) {
            lo[(size_t)i] -= 1;
            if (c.has_extent(i)) hi[(size_t)i] += 1;
        }
        std::vector<int64_t> b = lo;
        while (true) {
            GridCell top;
            top.anchor = b;
            top.extents = all_axes;
            out.insert(std::move(top));
            int i = 0;
            for (; i < N; ++i) {
                if (b[(size_t)i] < hi[(size_t)i]) { ++b[(size_t)i]; break; }
                b[(size_t)i] = lo[(size_t)i];
            }
            if (i == N) break;
        }
    }
    return out;
}

std::vector<GridCell> cells_in_lattice_box(const std::vector<int64_t>& lo,
                                           const std::vector<int64_t>& hi,
                                           int dim) {
    const int N = (int)lo.size();
    std::vector<GridCell> out;
    if (dim > N) return out;
    std::vector<int> ext((size_t)dim);
    for (int i = 0; i < dim; ++i) ext[(size_t)i] = i;
    while (true) {
        auto in_ext = [&](int ax) {
            return std::binary_search(ext.begin(), ext.end(), ax);
        };
        bool nonempty = true;
        for (int i = 0; i < N; ++i) {
            if (hi[(size_t)i] < lo[(size_t)i]) nonempty = false;
            if (in_ext(i) && hi[(size_t)i] <= lo[(size_t)i]) nonempty = false;
        }
        if (nonempty) {
            std::vector<int64_t> a = lo;
            while (true) {
                GridCell c;
                c.anchor = a;
                c.extents = ext;
                out.push_back(c);
                int i = 0;
                for (; i < N; ++i) {
                    int64_t top = hi[(size_t)i] - (in_ext(i) ? 1 : 0);
                    if (a[(size_t)i] < top) { ++a[(size_t)i]; break; }
                    a[(size_t)i] = lo[(size_t)i];
                }
                if (i == N) break;
            }
        }
        if (dim == 0) break;
        int j = dim - 1;
        while (j >= 0 && ext[(size_t)j] == N - dim + j) --j;
        if (j < 0) break;
        ++ext[(size_t)j];
        for (int k = j + 1; k < dim; ++k) ext[(size_t)k] = ext[(size_t)k - 1] + 1;
    }
    return out;
}

std::vector<GridCell> refine_cell(const GridCell& cell, int64_t factor) {
    if (factor < 1) throw std::invalid_argument("refinement factor must be >= 1");
    std::vector<GridCell> out;
    const int N = cell.ambient();
    std::vector<int64_t> base(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) base[(size_t)i] = cell.anchor[(size_t)i] * factor;
    const int d = cell.dim();
    std::vector<int64_t> offs(static_cast<size_t>(d), 0);
    while (true) {
        GridCell sub;
        sub.anchor = base;
        for (int j = 0; j < d; ++j)
            sub.anchor[(size_t)cell.extents[(size_t)j]] += offs[(size_t)j];
        sub.extents = cell.extents;
        out.push_back(std::move(sub));
        int j = 0;
        for (; j < d; ++j) {
            if (offs[(size_t)j] + 1 < factor) { ++offs[(size_t)j]; break; }
            offs[(size_t)j] = 0;
        }
        if (j == d) break;
    }
    return out;
}

} // namespace fillvol
