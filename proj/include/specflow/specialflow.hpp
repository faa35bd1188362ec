#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "specflow/cocycle.hpp"

namespace specflow {

// Representative of a point of (Z x R^d) / E_That.
struct QuotientPoint {
    OrbitPoint z;
    Vec r;
    // False when part of the search ball was outside the window, so a
    // better representative might exist.
    bool verified = true;
};

// That_n(z, r) = (T_n z, r + rho(n, z)).
class PrincipalExtension {
  public:
    PrincipalExtension(ZdSystem t, Cocycle rho);

    const ZdSystem& system() const { return t_; }
    const Cocycle& cocycle() const { return rho_; }

    // A point remembers the base it was lifted from and the total step, and
    // is resolved as (T_steps base, r0 + rho(steps, base)). Composition only
    // adds steps, so the action law holds bit for bit.
    struct Point {
        OrbitPoint base;
        IVec steps;
        Vec r0;
    };
    Point lift(const OrbitPoint& z, const Vec& r) const;
    std::optional<Point> act(const IVec& n, const Point& p) const;
    std::optional<std::pair<OrbitPoint, Vec>> resolve(const Point& p) const;
    std::optional<std::pair<OrbitPoint, Vec>> apply(const IVec& n, const OrbitPoint& z, const Vec& r) const;

    // Minimizes ||r'|| over the orbit, ties to the lexicographically smaller
    // r'. A descent moves close to the minimum first; the final search ball
    // of radius ceil(2 ||r'|| / K1) + 1 then certifies the minimizer.
    QuotientPoint canonicalize(const OrbitPoint& z, const Vec& r,
                               std::optional<std::int64_t> search_radius = std::nullopt) const;
    QuotientPoint flow_act(const QuotientPoint& p, const Vec& s) const;

  private:
    ZdSystem t_;
    Cocycle rho_;
};

// Same point of the quotient: equal orbit point and r within tol.
bool same_point(const QuotientPoint& a, const QuotientPoint& b, double tol);

struct TransversalResult {
    CheckResult check{"transversal"};
    std::vector<QuotientPoint> chosen;    // one per distinct orbit
    std::vector<std::size_t> orbit_of;    // input index -> orbit index
    std::vector<std::size_t> meets;       // #(orbit cap Y) per orbit
    std::vector<std::int64_t> level;      // k with orbit cap Y inside Y_k
};

// Y = disjoint union over k of Y_k minus the That-saturation of Y_{k-1},
// with Y_k = {||r|| <= k}, restricted to the orbits of the given points.
TransversalResult transversal(const PrincipalExtension& ext, const std::vector<std::pair<OrbitPoint, Vec>>& pts);

// rho'(n, y) = -rho(n, z) for y the canonical image of (z, 0), measured as
// the flow displacement between canonical images.
CheckResult duality_check(const PrincipalExtension& ext, std::size_t samples, std::int64_t max_step,
                          std::uint64_t seed, double tol = 1e-9);

// Flow under the ceiling function f over a Z-action on windowed orbits.
template <class S>
struct SuspensionSystem1D {
    std::function<S(const OrbitPoint&)> f;
    S floor;
    std::int64_t radius = 1000;
};

template <class S>
struct SuspPoint {
    OrbitPoint z;
    S t;
    friend bool operator==(const SuspPoint& a, const SuspPoint& b) { return a.z == b.z && a.t == b.t; }
};

// (z, t) + r by direct summation, index-ascending. Throws DomainError on a
// point outside {0 <= t < f(z)}, a ceiling below the floor, or when the
// orbit window is exhausted.
template <class S>
SuspPoint<S> suspend1d(const SuspensionSystem1D<S>& sys, const SuspPoint<S>& p, S r);

// Reference stepping by at most delta = min f / 8 at a time.
template <class S>
SuspPoint<S> suspend1d_stepping(const SuspensionSystem1D<S>& sys, const SuspPoint<S>& p, S r, S delta);

// rho(n, z) = -(f(z) + ... + f(T^{n-1} z)) for n > 0, and
// f(T^{-1} z) + ... + f(T^{n} z) for n < 0.
Cocycle suspension_cocycle(const SuspensionSystem1D<double>& sys);

// Compares suspend1d with the special flow over T with the cocycle above.
CheckResult cross_check_suspension(const SuspensionSystem1D<double>& sys, std::size_t samples, double max_r,
                                   std::uint64_t seed, double tol = 1e-9);

}  // namespace specflow

#include "specflow/specialflow_inl.hpp"
