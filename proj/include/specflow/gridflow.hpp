#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "specflow/cocycle.hpp"
#include "specflow/deform.hpp"
#include "specflow/partial_actions.hpp"
#include "specflow/toast.hpp"

namespace specflow {

struct GridParams {
    double alpha = 1.25;
    Coord R = Coord::ratio(1, 2);  // Z^d + B_R(0) covers R^d in the sup norm
    Coord K = 4;
};

// K is the smallest power of two with 1 - R/K > 1/alpha.
GridParams choose_constants(double alpha);

// v = nearest integer vector minus s, halves rounded toward -infinity.
QVec snap_vector(const QVec& s, Coord R = Coord::ratio(1, 2));
Vec snap_vector(const Vec& s, double R = 0.5);

// Truncated shift h_{phi(D), K, v, K} whose core {d(r, boundary) >= K}
// carries the child's own deformation: r -> gamma_D(r - s) + s + v there.
// On the core boundary gamma_D is the identity, so the two formulas agree.
class NestedShift : public PointMap {
  public:
    NestedShift(ShiftSpec spec, QVec s, std::shared_ptr<const PointMap> inner);

    int dim() const override { return h_.dim(); }
    Vec apply(const Vec& r) const override;
    Vec inverse(const Vec& y, double tol) const override;
    std::vector<Region> seams() const override;

    const ShiftMap& shift_map() const { return h_; }
    const QVec& s() const { return s_; }
    const std::shared_ptr<const PointMap>& inner() const { return inner_; }

  private:
    ShiftMap h_;
    QVec s_;
    Vec sd_;
    std::shared_ptr<const PointMap> inner_;
};

struct ChildShift {
    ClassRef child;
    QVec s;  // c_D - c_C
    QVec v;  // snap_vector(s)
};

struct AtlasEntry {
    ClassRef ref;
    QVec anchor;
    Region image;  // phi_n(C)
    Region core;   // phi_n(C') = image shrunk by K
    std::shared_ptr<const PiecewiseDeformation> g;
    std::vector<ChildShift> children;
};

class DeformationAtlas {
  public:
    GridParams params;
    int dim = 1;
    std::vector<std::vector<AtlasEntry>> levels;
    std::size_t distinct_maps = 0;

    int top() const { return static_cast<int>(levels.size()) - 1; }
    const AtlasEntry& at(ClassRef r) const { return levels.at(r.level).at(r.index); }
    // psi_n(x) = g(x - c_C) for x in C'.
    Vec psi(ClassRef c, const Vec& x) const;
    Vec psi_inverse(ClassRef c, const Vec& p, double tol = 1e-10) const;
};

// Throws ConstructionError when a child leaves the core of its parent or
// pieces overlap.
DeformationAtlas build_atlas(const PASequence& seq, const GridParams& params);

struct ClassGrid {
    std::uint64_t points = 0;
    std::uint64_t identity_points = 0;  // fixed exactly by g, not evaluated
    double max_forward_error = 0.0;
};

struct IntegerGrid {
    std::vector<std::vector<ClassGrid>> classes;
    CheckResult check{"grid_forward"};
    std::uint64_t total() const;
};

// Z_n = psi_n^{-1}(Z^d) per class. Integer points outside every piece are
// fixed by g exactly; points inside pieces are pulled back numerically and
// pushed forward again.
IntegerGrid extract_grid(const DeformationAtlas& atlas, double tol = 1e-10, double forward_tol = 1e-8);

// Calls fn(p, z) for every grid point z = psi^{-1}(p) of the class.
template <class F>
void for_each_grid_point(const DeformationAtlas& atlas, ClassRef c, F&& fn, double tol = 1e-10);

// Per child: s + v is an integer vector with ||v|| <= R, and the parent and
// child deformations differ by exactly s + v on the child's core.
CheckResult check_child_shifts(const DeformationAtlas& atlas, std::size_t samples_per_child, std::uint64_t seed,
                      double tol = 1e-10);
// Z_m inside C' lies in Z_n for every class contained in C; up to
// points_per_class grid points of each contained class are compared with
// their predicted integer image.
CheckResult check_nesting(const DeformationAtlas& atlas, const PASequence& seq, std::size_t points_per_class,
                          double tol = 1e-8);
CheckResult check_onto(const DeformationAtlas& atlas, std::size_t samples_per_class, std::uint64_t seed,
                       double tol = 1e-8);

// rho_{F2,F1} and rho_{F1,F2} of one class.
class GridCocycle {
  public:
    GridCocycle(const DeformationAtlas& atlas, ClassRef c) : atlas_(&atlas), c_(c) {}
    std::optional<Vec> rho21(const Vec& r, const Vec& x) const;
    std::optional<Vec> rho12(const Vec& r, const Vec& x) const;

  private:
    const DeformationAtlas* atlas_;
    ClassRef c_;
};

CheckResult check_cocycle_roundtrip(const DeformationAtlas& atlas, std::size_t samples, std::uint64_t seed,
                                    double tol = 2e-10);

// The Z^d-action on the top-level grid: seeds are top-level classes, orbit
// index m stands for the grid point psi^{-1}(m) + c.
class GridAction {
  public:
    explicit GridAction(std::shared_ptr<const DeformationAtlas> atlas);

    const ZdSystem& system() const { return system_; }
    const DeformationAtlas& atlas() const { return *atlas_; }
    // rho_{F,T}(n, z) = T_n z - z in window coordinates.
    Cocycle cocycle() const;
    // Window position of a grid point.
    std::optional<Vec> position(const OrbitPoint& z) const;
    // Grid point whose image is the integer nearest psi(x); x must lie in
    // the core of some top-level class.
    std::optional<OrbitPoint> nearest(const Vec& x) const;
    std::optional<std::uint32_t> seed_of(const Vec& x) const;
    ClassRef seed_class(std::uint32_t seed) const;

  private:
    struct State;
    std::shared_ptr<State> state_;
    std::shared_ptr<const DeformationAtlas> atlas_;
    ZdSystem system_;
};

// Closure of each top-level grid under +-e_j away from the core boundary,
// and a single integer coset per class.
Report verify_integer_grid(const GridAction& action, std::size_t samples, std::uint64_t seed, double tol = 1e-8);

}  // namespace specflow

#include "specflow/gridflow_inl.hpp"
