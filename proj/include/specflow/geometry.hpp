#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "specflow/vec.hpp"

namespace specflow {

// Closed box [lo, hi] with exact corners. Under the sup norm this is also the
// closed ball of radius r around its center.
struct Box {
    QVec lo;
    QVec hi;

    Box() = default;
    Box(QVec lo_, QVec hi_);
    static Box ball(const QVec& center, Coord radius);

    int dim() const { return lo.dim(); }
    // Positive volume; degenerate boxes are dropped from regions.
    bool full() const;
    Coord extent(int k) const { return hi[k] - lo[k]; }
    bool contains(const QVec& x) const;
    bool contains(const Vec& x) const;
    bool contains(const Box& b) const;
    bool intersects(const Box& b) const;  // closed boxes share a point
    bool overlaps(const Box& b) const;    // open interiors meet
    Box grown(Coord k) const;
    Box translated(const QVec& t) const;
    Box intersection(const Box& b) const;
    Box hull_with(const Box& b) const;

    friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
    friend bool operator<(const Box& a, const Box& b) {
        if (a.lo == b.lo) return a.hi < b.hi;
        return a.lo < b.lo;
    }
};

double distance(const Box& b, const Vec& x);
Coord distance(const Box& b, const QVec& x);
Coord distance(const Box& a, const Box& b);

// Regular closed union of boxes, always held in canonical form: the coarsest
// arrangement of its own face coordinates, with in-cells merged greedily in
// lexicographic cell order. Two regions are equal as sets iff their box
// lists are equal.
class Region {
  public:
    Region() = default;
    explicit Region(int dim) : dim_(dim) {}
    Region(int dim, std::vector<Box> boxes);
    explicit Region(const Box& b);
    struct CanonicalTag {};
    // Caller guarantees the boxes are already in canonical form.
    Region(int dim, std::vector<Box> boxes, CanonicalTag) : dim_(dim), boxes_(std::move(boxes)) {}

    int dim() const { return dim_; }
    bool empty() const { return boxes_.empty(); }
    const std::vector<Box>& boxes() const { return boxes_; }
    std::size_t size() const { return boxes_.size(); }

    bool contains(const QVec& x) const;
    bool contains(const Vec& x) const;
    bool contains(const Region& other) const;
    bool contains(const Box& b) const;
    bool intersects(const Region& other) const;
    bool intersects(const Box& b) const;
    Box hull() const;
    Region translated(const QVec& t) const;
    // Closed boxes covering hull(A) minus the interior of A, canonically merged.
    std::vector<Box> complement_in_hull() const;

    friend bool operator==(const Region& a, const Region& b) {
        return a.dim_ == b.dim_ && a.boxes_ == b.boxes_;
    }
    friend bool operator<(const Region& a, const Region& b) { return a.boxes_ < b.boxes_; }

  private:
    int dim_ = 0;
    std::vector<Box> boxes_;
};

Region unite(const Region& a, const Region& b);
Region intersect(const Region& a, const Region& b);
Region subtract(const Region& a, const Region& b);

// {x : dist(x, A) <= K}.
Region fatten(const Region& a, Coord k);
// A^L = {x in A : d(x, boundary) >= L}, regularized.
Region shrink(const Region& a, Coord l);

// d(x, complement of A); throws DomainError when x is not in A.
Coord boundary_distance(const Region& a, const QVec& x);
double boundary_distance(const Region& a, const Vec& x);

Coord diameter(const Region& a);
Coord set_distance(const Region& a, const Region& b);

// Interior-disjoint pieces of b minus the union of cutters (closed, full).
std::vector<Box> subtract_boxes(const Box& b, std::span<const Box> cutters);

// Precomputed double-precision view of a region for repeated distance
// queries. operator() returns d(x, complement) for x in A and 0 otherwise.
class BoundaryDistanceField {
  public:
    BoundaryDistanceField() = default;
    explicit BoundaryDistanceField(const Region& a);

    int dim() const { return dim_; }
    bool contains(const Vec& x) const;
    double operator()(const Vec& x) const;
    const Region& region() const { return region_; }

  private:
    struct DBox {
        std::array<double, kMaxDim> lo{}, hi{};
    };
    static double dist(const DBox& b, const Vec& x, int dim);

    int dim_ = 0;
    Region region_;
    DBox hull_;
    std::vector<DBox> inside_;
    std::vector<DBox> outside_;
};

struct PointSet {
    int dim = 1;
    std::vector<QVec> points;
    Coord lacunarity_radius;
    bool lacunary = false;
};

// Closest point in sup norm, ties to the lexicographically smallest.
QVec voronoi_assign(const PointSet& c, const QVec& x);
QVec voronoi_assign(const PointSet& c, const Vec& x);
bool check_lacunary(const PointSet& c, Coord r);

// Uniform hash grid over point coordinates for neighborhood queries.
class PointIndex {
  public:
    PointIndex(int dim, double cell);
    void insert(std::uint32_t id, const Vec& x);
    template <class F>
    void for_each_near(const Vec& x, double radius, F&& fn) const;
    std::size_t size() const { return count_; }

  private:
    std::uint64_t key(const std::array<std::int64_t, kMaxDim>& c) const;
    std::array<std::int64_t, kMaxDim> cell_of(const Vec& x) const;

    int dim_;
    double cell_;
    std::size_t count_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

// Hash grid over box ids, used to locate classes and pieces.
class BoxIndex {
  public:
    BoxIndex() = default;
    BoxIndex(int dim, double cell);
    void insert(std::uint32_t id, const Box& b);
    // Ids whose registered boxes may contain x, in insertion order per cell.
    const std::vector<std::uint32_t>* candidates(const Vec& x) const;
    // Ids whose boxes may meet b (deduplicated, sorted).
    std::vector<std::uint32_t> query(const Box& b) const;
    bool empty() const { return buckets_.empty(); }

  private:
    std::uint64_t key(const std::array<std::int64_t, kMaxDim>& c) const;

    int dim_ = 0;
    double cell_ = 1.0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

namespace detail {

// Integer points of a union of closed boxes, visited once each in
// lexicographic order. Boxes must share the dimension.
template <class F>
void integer_points_rec(std::vector<const Box*>& active, int axis, int dim, IVec& p, F& fn);

}  // namespace detail

template <class F>
void for_each_integer_point(const Region& a, F&& fn);
std::uint64_t count_integer_points(const Region& a);

}  // namespace specflow

#include "specflow/geometry_inl.hpp"
