#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "specflow/report.hpp"
#include "specflow/vec.hpp"

namespace specflow {

// A point of a windowed free Z^d-orbit: the orbit of base point `seed`,
// displaced by `index`.
struct OrbitPoint {
    std::uint32_t seed = 0;
    IVec index;

    friend bool operator==(const OrbitPoint& a, const OrbitPoint& b) {
        return a.seed == b.seed && a.index == b.index;
    }
    friend bool operator<(const OrbitPoint& a, const OrbitPoint& b) {
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.index < b.index;
    }
};

std::string to_string(const OrbitPoint& z);

// Finitely many seeds, each carrying the orbit window {n : ||n|| <= radius},
// optionally cut down further by a membership predicate.
class ZdSystem {
  public:
    ZdSystem() = default;
    ZdSystem(int dim, std::size_t seeds, std::int64_t radius,
             std::function<bool(const OrbitPoint&)> in_domain = {});

    int dim() const { return dim_; }
    std::size_t seeds() const { return seeds_; }
    std::int64_t radius() const { return radius_; }
    bool contains(const OrbitPoint& z) const;
    OrbitPoint base(std::uint32_t seed) const { return {seed, IVec(dim_)}; }
    // T_n z; free because the index moves by n.
    OrbitPoint act(const IVec& n, const OrbitPoint& z) const { return {z.seed, z.index + n}; }
    // Throws DomainError when T_n z leaves the window.
    OrbitPoint act_checked(const IVec& n, const OrbitPoint& z) const;

  private:
    int dim_ = 1;
    std::size_t seeds_ = 1;
    std::int64_t radius_ = 0;
    std::function<bool(const OrbitPoint&)> in_domain_;
};

struct Cocycle {
    int dim = 1;
    // Empty result: undefined at this (n, z) on the finite window.
    std::function<std::optional<Vec>(const IVec&, const OrbitPoint&)> eval;
    std::int64_t domain_radius = 0;
    double claimed_k1 = 1.0;
    double claimed_k2 = 1.0;
    std::string label;

    std::optional<Vec> operator()(const IVec& n, const OrbitPoint& z) const { return eval(n, z); }
};

// rho(n, z) = sign * n.
Cocycle linear_cocycle(int dim, double sign, std::int64_t radius);
Cocycle negated(const Cocycle& rho);

// Uniform z in the inner half of the window, n and m with norm <= radius / 4.
CheckResult check_cocycle_identity(const Cocycle& rho, const ZdSystem& t, std::size_t samples, std::uint64_t seed,
                                   double tol = 1e-9);

struct AdmissibleOptions {
    std::size_t base_points = 8;
    // Escape schedule: min over ||n|| = k of ||rho(n, z)|| must reach
    // threshold(k). Defaults to claimed_k1 * k.
    std::function<double(std::int64_t)> threshold;
    std::uint64_t seed = 1;
};

CheckResult check_admissible(const Cocycle& rho, const ZdSystem& t, std::int64_t radius,
                             const AdmissibleOptions& opt = {});

struct CocycleConstants {
    CheckResult check{"cocycle_constants"};
    double k1 = 0.0;
    double k2 = 0.0;
};

// Quotients ||rho(m, z) - rho(n, z)|| / ||m - n|| over random z and
// steps with ||m||, ||n|| <= max_step; must lie in [lo, hi].
CocycleConstants estimate_cocycle_constants(const Cocycle& rho, const ZdSystem& t, std::size_t samples,
                                            std::int64_t max_step, std::uint64_t seed, double lo, double hi);

// Uniformly random point of the system's window satisfying its predicate.
std::optional<OrbitPoint> sample_orbit_point(const ZdSystem& t, std::mt19937_64& rng, std::int64_t radius,
                                             int attempts = 256);

}  // namespace specflow
