#include "specflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace specflow {

// ---------------------------------------------------------------- Box

Box::Box(QVec lo_, QVec hi_) : lo(lo_), hi(hi_) {
    if (lo.dim() != hi.dim()) throw DomainError("box corners differ in dimension");
    for (int k = 0; k < lo.dim(); ++k)
        if (hi[k] < lo[k]) throw DomainError("box with lo > hi on axis " + std::to_string(k));
}

Box Box::ball(const QVec& c, Coord r) {
    if (r < Coord{}) throw DomainError("negative ball radius");
    QVec lo = c, hi = c;
    for (int k = 0; k < c.dim(); ++k) {
        lo[k] -= r;
        hi[k] += r;
    }
    return Box(lo, hi);
}

bool Box::full() const {
    for (int k = 0; k < dim(); ++k)
        if (!(lo[k] < hi[k])) return false;
    return dim() > 0;
}

bool Box::contains(const QVec& x) const {
    for (int k = 0; k < dim(); ++k)
        if (x[k] < lo[k] || hi[k] < x[k]) return false;
    return true;
}

bool Box::contains(const Vec& x) const {
    for (int k = 0; k < dim(); ++k)
        if (x[k] < lo[k].to_double() || hi[k].to_double() < x[k]) return false;
    return true;
}

bool Box::contains(const Box& b) const {
    for (int k = 0; k < dim(); ++k)
        if (b.lo[k] < lo[k] || hi[k] < b.hi[k]) return false;
    return true;
}

bool Box::intersects(const Box& b) const {
    for (int k = 0; k < dim(); ++k)
        if (b.hi[k] < lo[k] || hi[k] < b.lo[k]) return false;
    return true;
}

bool Box::overlaps(const Box& b) const {
    for (int k = 0; k < dim(); ++k)
        if (!(b.lo[k] < hi[k] && lo[k] < b.hi[k])) return false;
    return true;
}

Box Box::grown(Coord k) const {
    Box r = *this;
    for (int i = 0; i < dim(); ++i) {
        r.lo[i] -= k;
        r.hi[i] += k;
    }
    if (k < Coord{})
        for (int i = 0; i < dim(); ++i)
            if (r.hi[i] < r.lo[i]) r.hi[i] = r.lo[i];
    return r;
}

Box Box::translated(const QVec& t) const {
    Box r = *this;
    r.lo += t;
    r.hi += t;
    return r;
}

Box Box::intersection(const Box& b) const {
    Box r = *this;
    for (int k = 0; k < dim(); ++k) {
        r.lo[k] = max(lo[k], b.lo[k]);
        r.hi[k] = min(hi[k], b.hi[k]);
        if (r.hi[k] < r.lo[k]) r.hi[k] = r.lo[k];
    }
    return r;
}

Box Box::hull_with(const Box& b) const {
    Box r = *this;
    for (int k = 0; k < dim(); ++k) {
        r.lo[k] = min(lo[k], b.lo[k]);
        r.hi[k] = max(hi[k], b.hi[k]);
    }
    return r;
}

double distance(const Box& b, const Vec& x) {
    double d = 0.0;
    for (int k = 0; k < b.dim(); ++k) {
        d = std::max(d, b.lo[k].to_double() - x[k]);
        d = std::max(d, x[k] - b.hi[k].to_double());
    }
    return d;
}

Coord distance(const Box& b, const QVec& x) {
    Coord d;
    for (int k = 0; k < b.dim(); ++k) {
        d = max(d, b.lo[k] - x[k]);
        d = max(d, x[k] - b.hi[k]);
    }
    return d;
}

Coord distance(const Box& a, const Box& b) {
    Coord d;
    for (int k = 0; k < a.dim(); ++k) {
        d = max(d, b.lo[k] - a.hi[k]);
        d = max(d, a.lo[k] - b.hi[k]);
    }
    return d;
}

// ---------------------------------------------------------------- arrangement

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 28;

// Cell grid spanned by a set of face coordinates. Cells are the open boxes
// between consecutive coordinates; axis 0 is the most significant index.
struct Grid {
    int dim = 0;
    std::array<std::vector<Coord>, kMaxDim> coords;
    std::array<std::size_t, kMaxDim> n{1, 1, 1};
    std::array<std::size_t, kMaxDim> stride{0, 0, 0};
    std::vector<std::uint8_t> cells;

    std::size_t total() const {
        std::size_t t = 1;
        for (int k = 0; k < dim; ++k) t *= n[k];
        return t;
    }

    void reset_strides() {
        std::size_t s = 1;
        for (int k = dim - 1; k >= 0; --k) {
            stride[k] = s;
            s *= n[k];
        }
    }

    void build(int d, std::span<const Box> boxes) {
        dim = d;
        for (int k = 0; k < dim; ++k) {
            auto& c = coords[k];
            c.clear();
            c.reserve(boxes.size() * 2);
            for (const Box& b : boxes) {
                c.push_back(b.lo[k]);
                c.push_back(b.hi[k]);
            }
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
            n[k] = c.size() > 1 ? c.size() - 1 : 0;
        }
        reset_strides();
        std::size_t t = total();
        if (t > kMaxCells) throw DomainError("box arrangement too large");
        cells.assign(t, 0);
    }

    // Index range [a, z) of cells covered by [lo, hi] on axis k.
    void range(const Box& b, int k, std::size_t& a, std::size_t& z) const {
        const auto& c = coords[k];
        a = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), b.lo[k]) - c.begin());
        z = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), b.hi[k]) - c.begin());
    }

    template <class F>
    void for_block(const std::array<std::size_t, kMaxDim>& a, const std::array<std::size_t, kMaxDim>& z,
                   F&& fn) const {
        std::array<std::size_t, kMaxDim> i = a;
        for (int k = 0; k < dim; ++k)
            if (a[k] >= z[k]) return;
        while (true) {
            std::size_t idx = 0;
            for (int k = 0; k < dim; ++k) idx += i[k] * stride[k];
            fn(idx);
            int k = dim - 1;
            for (; k >= 0; --k) {
                if (++i[k] < z[k]) break;
                i[k] = a[k];
            }
            if (k < 0) break;
        }
    }

    void mark(const Box& b, std::uint8_t bit) {
        std::array<std::size_t, kMaxDim> a{}, z{};
        for (int k = 0; k < dim; ++k) range(b, k, a[k], z[k]);
        for_block(a, z, [&](std::size_t idx) { cells[idx] |= bit; });
    }
};

// Boolean cell grid reduced to the coarsest arrangement that still
// represents the same set, then merged into boxes.
struct Selection {
    int dim = 0;
    std::array<std::vector<Coord>, kMaxDim> coords;
    std::array<std::size_t, kMaxDim> n{1, 1, 1};
    std::vector<char> sel;

    std::size_t stride(int k) const {
        std::size_t s = 1;
        for (int j = dim - 1; j > k; --j) s *= n[j];
        return s;
    }

    // Collapse axis k by keeping only the listed slabs (each slab of the new
    // grid copies the representative old slab).
    void remap_axis(int k, const std::vector<std::size_t>& keep_slabs, std::vector<Coord> new_coords) {
        std::size_t outer = 1;
        for (int j = 0; j < k; ++j) outer *= n[j];
        std::size_t inner = stride(k);
        std::size_t nk = keep_slabs.size();
        std::vector<char> out(outer * nk * inner);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t s = 0; s < nk; ++s) {
                const char* src = sel.data() + (o * n[k] + keep_slabs[s]) * inner;
                std::copy(src, src + inner, out.data() + (o * nk + s) * inner);
            }
        sel.swap(out);
        n[k] = nk;
        coords[k] = std::move(new_coords);
    }

    bool slab_equal(int k, std::size_t s, std::size_t t) const {
        std::size_t outer = 1;
        for (int j = 0; j < k; ++j) outer *= n[j];
        std::size_t inner = stride(k);
        for (std::size_t o = 0; o < outer; ++o) {
            const char* a = sel.data() + (o * n[k] + s) * inner;
            const char* b = sel.data() + (o * n[k] + t) * inner;
            if (!std::equal(a, a + inner, b)) return false;
        }
        return true;
    }

    bool slab_empty(int k, std::size_t s) const {
        std::size_t outer = 1;
        for (int j = 0; j < k; ++j) outer *= n[j];
        std::size_t inner = stride(k);
        for (std::size_t o = 0; o < outer; ++o) {
            const char* a = sel.data() + (o * n[k] + s) * inner;
            if (std::any_of(a, a + inner, [](char c) { return c != 0; })) return false;
        }
        return true;
    }

    bool any() const {
        return std::any_of(sel.begin(), sel.end(), [](char c) { return c != 0; });
    }

    void minimize() {
        for (int k = 0; k < dim; ++k) {
            std::size_t first = 0, last = n[k];
            while (first < last && slab_empty(k, first)) ++first;
            while (last > first && slab_empty(k, last - 1)) --last;
            std::vector<std::size_t> keep;
            std::vector<Coord> nc;
            for (std::size_t s = first; s < last; ++s) {
                if (!keep.empty() && slab_equal(k, keep.back(), s)) continue;
                keep.push_back(s);
                nc.push_back(coords[k][s]);
            }
            if (keep.empty()) {
                n[k] = 0;
                sel.clear();
                coords[k].clear();
                return;
            }
            nc.push_back(coords[k][last]);
            remap_axis(k, keep, std::move(nc));
        }
    }

    std::vector<Box> merge() {
        std::vector<Box> out;
        std::size_t t = 1;
        for (int k = 0; k < dim; ++k) t *= n[k];
        if (t == 0 || sel.empty()) return out;
        std::array<std::size_t, kMaxDim> st{};
        for (int k = 0; k < dim; ++k) st[k] = stride(k);
        std::vector<char> used(t, 0);
        auto free_cell = [&](std::size_t idx) { return sel[idx] && !used[idx]; };
        auto block_free = [&](const std::array<std::size_t, kMaxDim>& a, const std::array<std::size_t, kMaxDim>& z) {
            std::array<std::size_t, kMaxDim> i = a;
            while (true) {
                std::size_t idx = 0;
                for (int k = 0; k < dim; ++k) idx += i[k] * st[k];
                if (!free_cell(idx)) return false;
                int k = dim - 1;
                for (; k >= 0; --k) {
                    if (++i[k] < z[k]) break;
                    i[k] = a[k];
                }
                if (k < 0) return true;
            }
        };
        std::array<std::size_t, kMaxDim> i{};
        for (std::size_t idx = 0; idx < t; ++idx) {
            if (!free_cell(idx)) continue;
            std::size_t rem = idx;
            for (int k = 0; k < dim; ++k) {
                i[k] = rem / st[k];
                rem %= st[k];
            }
            std::array<std::size_t, kMaxDim> z{};
            for (int k = 0; k < dim; ++k) z[k] = i[k] + 1;
            for (int k = dim - 1; k >= 0; --k) {
                while (z[k] < n[k]) {
                    auto a2 = i;
                    auto z2 = z;
                    a2[k] = z[k];
                    z2[k] = z[k] + 1;
                    if (!block_free(a2, z2)) break;
                    ++z[k];
                }
            }
            std::array<std::size_t, kMaxDim> j = i;
            while (true) {
                std::size_t id2 = 0;
                for (int k = 0; k < dim; ++k) id2 += j[k] * st[k];
                used[id2] = 1;
                int k = dim - 1;
                for (; k >= 0; --k) {
                    if (++j[k] < z[k]) break;
                    j[k] = i[k];
                }
                if (k < 0) break;
            }
            QVec lo(dim), hi(dim);
            for (int k = 0; k < dim; ++k) {
                lo[k] = coords[k][i[k]];
                hi[k] = coords[k][z[k]];
            }
            out.emplace_back(lo, hi);
        }
        return out;
    }
};

template <class Pred>
std::vector<Box> select_boxes(const Grid& g, Pred pred) {
    Selection s;
    s.dim = g.dim;
    s.coords = g.coords;
    s.n = g.n;
    s.sel.resize(g.cells.size());
    for (std::size_t i = 0; i < g.cells.size(); ++i) s.sel[i] = pred(g.cells[i]) ? 1 : 0;
    if (!s.any()) return {};
    s.minimize();
    return s.merge();
}

std::vector<Box> full_boxes(std::vector<Box> boxes) {
    boxes.erase(std::remove_if(boxes.begin(), boxes.end(), [](const Box& b) { return !b.full(); }),
                boxes.end());
    return boxes;
}

// Canonical form of a union.
std::vector<Box> canonical_union(int dim, std::vector<Box> boxes) {
    boxes = full_boxes(std::move(boxes));
    if (boxes.size() <= 1) return boxes;
    // Exact duplicates add nothing to the arrangement.
    std::sort(boxes.begin(), boxes.end());
    boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
    if (boxes.size() <= 1) return boxes;
    Grid g;
    g.build(dim, boxes);
    for (const Box& b : boxes) g.mark(b, 1);
    return select_boxes(g, [](std::uint8_t c) { return c != 0; });
}

}  // namespace

// ---------------------------------------------------------------- Region

Region::Region(int dim, std::vector<Box> boxes) : dim_(dim) {
    for (const Box& b : boxes)
        if (b.dim() != dim) throw DomainError("box dimension does not match region dimension");
    boxes_ = canonical_union(dim, std::move(boxes));
}

Region::Region(const Box& b) : dim_(b.dim()) {
    if (b.full()) boxes_.push_back(b);
}

bool Region::contains(const QVec& x) const {
    for (const Box& b : boxes_)
        if (b.contains(x)) return true;
    return false;
}

bool Region::contains(const Vec& x) const {
    for (const Box& b : boxes_)
        if (b.contains(x)) return true;
    return false;
}

bool Region::contains(const Box& b) const {
    if (!b.full()) {
        // Degenerate boxes are measure zero; test their corners and center.
        return contains(b.lo) && contains(b.hi);
    }
    std::vector<Box> cutters;
    for (const Box& c : boxes_)
        if (c.overlaps(b)) cutters.push_back(c);
    return subtract_boxes(b, cutters).empty();
}

bool Region::contains(const Region& other) const {
    if (other.empty()) return true;
    if (empty()) return false;
    if (!hull().contains(other.hull())) return false;
    for (const Box& b : other.boxes_)
        if (!contains(b)) return false;
    return true;
}

bool Region::intersects(const Box& b) const {
    for (const Box& c : boxes_)
        if (c.intersects(b)) return true;
    return false;
}

bool Region::intersects(const Region& other) const {
    if (empty() || other.empty()) return false;
    if (!hull().intersects(other.hull())) return false;
    for (const Box& b : other.boxes_)
        if (intersects(b)) return true;
    return false;
}

Box Region::hull() const {
    if (boxes_.empty()) throw DomainError("hull of an empty region");
    Box h = boxes_.front();
    for (const Box& b : boxes_) h = h.hull_with(b);
    return h;
}

Region Region::translated(const QVec& t) const {
    std::vector<Box> out;
    out.reserve(boxes_.size());
    for (const Box& b : boxes_) out.push_back(b.translated(t));
    return Region(dim_, std::move(out), CanonicalTag{});
}

std::vector<Box> Region::complement_in_hull() const {
    if (boxes_.size() <= 1) return {};
    Grid g;
    g.build(dim_, boxes_);
    for (const Box& b : boxes_) g.mark(b, 1);
    return select_boxes(g, [](std::uint8_t c) { return c == 0; });
}

Region unite(const Region& a, const Region& b) {
    std::vector<Box> all = a.boxes();
    all.insert(all.end(), b.boxes().begin(), b.boxes().end());
    return Region(std::max(a.dim(), b.dim()), std::move(all));
}

Region intersect(const Region& a, const Region& b) {
    std::vector<Box> out;
    for (const Box& x : a.boxes())
        for (const Box& y : b.boxes())
            if (x.overlaps(y)) out.push_back(x.intersection(y));
    return Region(a.dim(), std::move(out));
}

Region subtract(const Region& a, const Region& b) {
    if (a.empty() || b.empty()) return a;
    std::vector<Box> all = a.boxes();
    all.insert(all.end(), b.boxes().begin(), b.boxes().end());
    Grid g;
    g.build(a.dim(), all);
    for (const Box& x : a.boxes()) g.mark(x, 1);
    for (const Box& y : b.boxes()) g.mark(y, 2);
    return Region(a.dim(), select_boxes(g, [](std::uint8_t c) { return c == 1; }), Region::CanonicalTag{});
}

Region fatten(const Region& a, Coord k) {
    if (k < Coord{}) throw DomainError("fatten: K must be >= 0");
    if (k == Coord{}) return a;
    std::vector<Box> out;
    out.reserve(a.size());
    for (const Box& b : a.boxes()) out.push_back(b.grown(k));
    return Region(a.dim(), std::move(out));
}

Region shrink(const Region& a, Coord l) {
    if (l < Coord{}) throw DomainError("shrink: L must be >= 0");
    if (l == Coord{} || a.empty()) return a;
    const int d = a.dim();
    Box h = a.hull();
    Box inner = h;
    for (int k = 0; k < d; ++k) {
        inner.lo[k] += l;
        inner.hi[k] -= l;
        if (!(inner.lo[k] < inner.hi[k])) return Region(d);
    }
    std::vector<Box> holes;
    for (const Box& q : a.complement_in_hull()) {
        Box g = q.grown(l).intersection(inner);
        if (g.full()) holes.push_back(g);
    }
    if (holes.empty()) return Region(inner);
    std::vector<Box> all = holes;
    all.push_back(inner);
    Grid g;
    g.build(d, all);
    g.mark(inner, 1);
    for (const Box& q : holes) g.mark(q, 2);
    return Region(d, select_boxes(g, [](std::uint8_t c) { return c == 1; }), Region::CanonicalTag{});
}

Coord boundary_distance(const Region& a, const QVec& x) {
    if (!a.contains(x)) throw DomainError("boundary_distance: point " + to_string(x) + " is not in the region");
    Box h = a.hull();
    Coord d = h.hi[0] - h.lo[0];
    for (int k = 0; k < a.dim(); ++k) {
        d = min(d, x[k] - h.lo[k]);
        d = min(d, h.hi[k] - x[k]);
    }
    for (const Box& q : a.complement_in_hull()) d = min(d, distance(q, x));
    return d;
}

double boundary_distance(const Region& a, const Vec& x) {
    if (!a.contains(x)) throw DomainError("boundary_distance: point " + to_string(x) + " is not in the region");
    return BoundaryDistanceField(a)(x);
}

Coord diameter(const Region& a) {
    if (a.empty()) throw DomainError("diameter of an empty region");
    Box h = a.hull();
    Coord d;
    for (int k = 0; k < a.dim(); ++k) d = max(d, h.extent(k));
    return d;
}

Coord set_distance(const Region& a, const Region& b) {
    if (a.empty() || b.empty()) throw DomainError("set_distance of an empty region");
    Coord best = distance(a.boxes().front(), b.boxes().front());
    for (const Box& x : a.boxes())
        for (const Box& y : b.boxes()) {
            best = min(best, distance(x, y));
            if (best == Coord{}) return best;
        }
    return best;
}

std::vector<Box> subtract_boxes(const Box& b, std::span<const Box> cutters) {
    std::vector<Box> work;
    if (b.full()) work.push_back(b);
    std::vector<Box> next;
    for (const Box& c : cutters) {
        if (work.empty()) break;
        next.clear();
        for (const Box& w : work) {
            if (!w.overlaps(c)) {
                next.push_back(w);
                continue;
            }
            Box rest = w;
            for (int k = 0; k < w.dim(); ++k) {
                if (rest.lo[k] < c.lo[k]) {
                    Box piece = rest;
                    piece.hi[k] = c.lo[k];
                    next.push_back(piece);
                    rest.lo[k] = c.lo[k];
                }
                if (c.hi[k] < rest.hi[k]) {
                    Box piece = rest;
                    piece.lo[k] = c.hi[k];
                    next.push_back(piece);
                    rest.hi[k] = c.hi[k];
                }
            }
        }
        work.swap(next);
    }
    return work;
}

// ---------------------------------------------------------------- distance field

BoundaryDistanceField::BoundaryDistanceField(const Region& a) : dim_(a.dim()), region_(a) {
    auto conv = [this](const Box& b) {
        DBox d;
        for (int k = 0; k < dim_; ++k) {
            d.lo[k] = b.lo[k].to_double();
            d.hi[k] = b.hi[k].to_double();
        }
        return d;
    };
    if (a.empty()) return;
    hull_ = conv(a.hull());
    for (const Box& b : a.boxes()) inside_.push_back(conv(b));
    for (const Box& q : a.complement_in_hull()) outside_.push_back(conv(q));
}

double BoundaryDistanceField::dist(const DBox& b, const Vec& x, int dim) {
    double d = 0.0;
    for (int k = 0; k < dim; ++k) {
        d = std::max(d, b.lo[k] - x[k]);
        d = std::max(d, x[k] - b.hi[k]);
    }
    return d;
}

bool BoundaryDistanceField::contains(const Vec& x) const {
    for (const DBox& b : inside_) {
        bool in = true;
        for (int k = 0; k < dim_ && in; ++k) in = b.lo[k] <= x[k] && x[k] <= b.hi[k];
        if (in) return true;
    }
    return false;
}

double BoundaryDistanceField::operator()(const Vec& x) const {
    if (inside_.empty()) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim_; ++k) {
        d = std::min(d, x[k] - hull_.lo[k]);
        d = std::min(d, hull_.hi[k] - x[k]);
    }
    if (d <= 0.0) return 0.0;
    for (const DBox& q : outside_) {
        d = std::min(d, dist(q, x, dim_));
        if (d == 0.0) return 0.0;
    }
    return d;
}

// ---------------------------------------------------------------- point sets

QVec voronoi_assign(const PointSet& c, const QVec& x) {
    if (c.points.empty()) throw DomainError("voronoi_assign: empty point set");
    const QVec* best = &c.points.front();
    Coord bd = norm(*best - x);
    for (const QVec& p : c.points) {
        Coord d = norm(p - x);
        if (d < bd || (d == bd && p < *best)) {
            best = &p;
            bd = d;
        }
    }
    return *best;
}

QVec voronoi_assign(const PointSet& c, const Vec& x) {
    if (c.points.empty()) throw DomainError("voronoi_assign: empty point set");
    const QVec* best = &c.points.front();
    double bd = norm(to_vec(*best) - x);
    for (const QVec& p : c.points) {
        double d = norm(to_vec(p) - x);
        if (d < bd || (d == bd && p < *best)) {
            best = &p;
            bd = d;
        }
    }
    return *best;
}

bool check_lacunary(const PointSet& c, Coord r) {
    if (c.points.size() < 2) return true;
    double cell = std::max(r.to_double(), 1e-6);
    PointIndex idx(c.dim, cell);
    for (std::uint32_t i = 0; i < c.points.size(); ++i) {
        const QVec& p = c.points[i];
        bool ok = true;
        idx.for_each_near(to_vec(p), cell, [&](std::uint32_t j) {
            if (norm(c.points[j] - p) <= r) ok = false;
        });
        if (!ok) return false;
        idx.insert(i, to_vec(p));
    }
    return true;
}

namespace {

std::uint64_t mix_cells(const std::array<std::int64_t, kMaxDim>& c, int dim) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int k = 0; k < dim; ++k) {
        std::uint64_t z = static_cast<std::uint64_t>(c[k]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        h ^= z ^ (z >> 31);
    }
    return h;
}

}  // namespace

PointIndex::PointIndex(int dim, double cell) : dim_(dim), cell_(cell) {
    if (!(cell > 0.0)) throw DomainError("PointIndex cell must be positive");
}

std::array<std::int64_t, kMaxDim> PointIndex::cell_of(const Vec& x) const {
    std::array<std::int64_t, kMaxDim> c{};
    for (int k = 0; k < dim_; ++k) c[k] = static_cast<std::int64_t>(std::floor(x[k] / cell_));
    return c;
}

std::uint64_t PointIndex::key(const std::array<std::int64_t, kMaxDim>& c) const { return mix_cells(c, dim_); }

void PointIndex::insert(std::uint32_t id, const Vec& x) {
    buckets_[key(cell_of(x))].push_back(id);
    ++count_;
}

BoxIndex::BoxIndex(int dim, double cell) : dim_(dim), cell_(cell) {
    if (!(cell > 0.0)) throw DomainError("BoxIndex cell must be positive");
}

std::uint64_t BoxIndex::key(const std::array<std::int64_t, kMaxDim>& c) const { return mix_cells(c, dim_); }

void BoxIndex::insert(std::uint32_t id, const Box& b) {
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    for (int k = 0; k < dim_; ++k) {
        lo[k] = static_cast<std::int64_t>(std::floor(b.lo[k].to_double() / cell_));
        hi[k] = static_cast<std::int64_t>(std::floor(b.hi[k].to_double() / cell_));
    }
    auto c = lo;
    while (true) {
        auto& v = buckets_[key(c)];
        if (v.empty() || v.back() != id) v.push_back(id);
        int k = 0;
        for (; k < dim_; ++k) {
            if (++c[k] <= hi[k]) break;
            c[k] = lo[k];
        }
        if (k == dim_) break;
    }
}

const std::vector<std::uint32_t>* BoxIndex::candidates(const Vec& x) const {
    std::array<std::int64_t, kMaxDim> c{};
    for (int k = 0; k < dim_; ++k) c[k] = static_cast<std::int64_t>(std::floor(x[k] / cell_));
    auto it = buckets_.find(key(c));
    return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<std::uint32_t> BoxIndex::query(const Box& b) const {
    std::vector<std::uint32_t> out;
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    for (int k = 0; k < dim_; ++k) {
        lo[k] = static_cast<std::int64_t>(std::floor(b.lo[k].to_double() / cell_));
        hi[k] = static_cast<std::int64_t>(std::floor(b.hi[k].to_double() / cell_));
    }
    auto c = lo;
    while (true) {
        auto it = buckets_.find(key(c));
        if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
        int k = 0;
        for (; k < dim_; ++k) {
            if (++c[k] <= hi[k]) break;
            c[k] = lo[k];
        }
        if (k == dim_) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint64_t count_integer_points(const Region& a) {
    std::uint64_t n = 0;
    for_each_integer_point(a, [&](const IVec&) { ++n; });
    return n;
}

}  // namespace specflow
