#pragma once

// Template definitions for geometry.hpp.

#include <algorithm>
#include <cmath>

namespace specflow {

template <class F>
void PointIndex::for_each_near(const Vec& x, double radius, F&& fn) const {
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    for (int k = 0; k < dim_; ++k) {
        lo[k] = static_cast<std::int64_t>(std::floor((x[k] - radius) / cell_));
        hi[k] = static_cast<std::int64_t>(std::floor((x[k] + radius) / cell_));
    }
    std::array<std::int64_t, kMaxDim> c = lo;
    while (true) {
        auto it = buckets_.find(key(c));
        if (it != buckets_.end())
            for (auto id : it->second) fn(id);
        int k = 0;
        for (; k < dim_; ++k) {
            if (++c[k] <= hi[k]) break;
            c[k] = lo[k];
        }
        if (k == dim_) break;
    }
}

namespace detail {

template <class F>
void integer_points_rec(std::vector<const Box*>& active, int axis, int dim, IVec& p, F& fn) {
    if (active.empty()) return;
    if (axis == dim - 1) {
        std::vector<std::pair<std::int64_t, std::int64_t>> spans;
        spans.reserve(active.size());
        for (const Box* b : active) {
            std::int64_t a = b->lo[axis].ceil_int();
            std::int64_t z = b->hi[axis].floor_int();
            if (a <= z) spans.emplace_back(a, z);
        }
        std::sort(spans.begin(), spans.end());
        std::int64_t next = 0;
        bool started = false;
        for (auto [a, z] : spans) {
            if (started) a = std::max(a, next);
            for (std::int64_t t = a; t <= z; ++t) {
                p[axis] = t;
                fn(static_cast<const IVec&>(p));
            }
            if (!started || z + 1 > next) next = z + 1;
            started = true;
        }
        return;
    }
    std::int64_t first = active.front()->lo[axis].ceil_int();
    std::int64_t last = active.front()->hi[axis].floor_int();
    for (const Box* b : active) {
        first = std::min(first, b->lo[axis].ceil_int());
        last = std::max(last, b->hi[axis].floor_int());
    }
    std::vector<const Box*> slice;
    slice.reserve(active.size());
    for (std::int64_t t = first; t <= last; ++t) {
        Coord ct = Coord::from_int(t);
        slice.clear();
        for (const Box* b : active)
            if (b->lo[axis] <= ct && ct <= b->hi[axis]) slice.push_back(b);
        if (slice.empty()) continue;
        p[axis] = t;
        integer_points_rec(slice, axis + 1, dim, p, fn);
    }
}

}  // namespace detail

template <class F>
void for_each_integer_point(const Region& a, F&& fn) {
    if (a.empty()) return;
    std::vector<const Box*> active;
    active.reserve(a.boxes().size());
    for (const Box& b : a.boxes()) active.push_back(&b);
    IVec p(a.dim());
    detail::integer_points_rec(active, 0, a.dim(), p, fn);
}

}  // namespace specflow
