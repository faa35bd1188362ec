#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <utility>
#include <vector>

#include "specflow/geometry.hpp"
#include "specflow/report.hpp"

namespace specflow {

class PointMap {
  public:
    virtual ~PointMap() = default;
    virtual int dim() const = 0;
    virtual Vec apply(const Vec& x) const = 0;
    // Default throws: not every test map can be inverted.
    virtual Vec inverse(const Vec& y, double tol) const;
    // Regions whose boundaries are seams of the map, where difference
    // quotients are extreme.
    virtual std::vector<Region> seams() const { return {}; }
};

// f_{A,K,v} when L is absent, h_{A,K,v,L} otherwise.
struct ShiftSpec {
    Region A;
    Coord K;
    QVec v;
    std::optional<Coord> L;

    void validate() const;
    double alpha_minus() const { return 1.0 - norm(to_vec(v)) / K.to_double(); }
    double alpha_plus() const { return 1.0 + norm(to_vec(v)) / K.to_double(); }
};

class ShiftMap : public PointMap {
  public:
    explicit ShiftMap(ShiftSpec spec);

    int dim() const override { return spec_.A.dim(); }
    // Throws DomainError when x is not in A.
    Vec apply(const Vec& x) const override;
    // Outside A the displacement is zero, so this is the identity there.
    Vec apply_unchecked(const Vec& x) const { return x + factor(x) * v_; }
    // Bisection on t in x = y - t v, t in [0, L/K].
    Vec inverse(const Vec& y, double tol) const override;
    std::vector<Region> seams() const override;

    // min(d(x, boundary), L) / K
    double factor(const Vec& x) const { return std::min(field_(x), cap_) / k_; }
    double distance_to_boundary(const Vec& x) const { return field_(x); }
    const ShiftSpec& spec() const { return spec_; }
    const Vec& shift() const { return v_; }
    double K() const { return k_; }
    const BoundaryDistanceField& field() const { return field_; }

  private:
    ShiftSpec spec_;
    BoundaryDistanceField field_;
    Vec v_;
    double k_;
    double cap_;
};

Vec eval_f(const ShiftSpec& spec, const Vec& x);
Vec eval_h(const ShiftSpec& spec, const Vec& x);
Vec invert(const PointMap& map, const Vec& y, double tol = 1e-10);

// Bisection for t = tau(y - t v) with tau (1/K)-Lipschitz along v and
// ||v|| < K, so t - tau(y - t v) is strictly increasing.
template <class Tau>
double solve_displacement(const Vec& y, const Vec& v, double t_hi, double tol, Tau&& tau) {
    double vn = norm(v);
    if (vn == 0.0) return 0.0;
    double lo = 0.0, hi = t_hi;
    if (lo - tau(y) >= 0.0) return 0.0;
    for (int it = 0; it < 200 && (hi - lo) * vn > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid - tau(y - mid * v) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

class FunctionMap : public PointMap {
  public:
    FunctionMap(int dim, std::function<Vec(const Vec&)> f) : dim_(dim), f_(std::move(f)) {}
    int dim() const override { return dim_; }
    Vec apply(const Vec& x) const override { return f_(x); }

  private:
    int dim_;
    std::function<Vec(const Vec&)> f_;
};

class IdentityMap : public PointMap {
  public:
    explicit IdentityMap(int dim) : dim_(dim) {}
    int dim() const override { return dim_; }
    Vec apply(const Vec& x) const override { return x; }
    Vec inverse(const Vec& y, double) const override { return y; }

  private:
    int dim_;
};

struct Piece {
    Region region;
    std::shared_ptr<const PointMap> map;
};

// g(x) = h_i(x) on piece i, x elsewhere in the ambient region.
class PiecewiseDeformation : public PointMap {
  public:
    PiecewiseDeformation(int dim, std::vector<Piece> pieces, Region ambient);

    int dim() const override { return dim_; }
    Vec apply(const Vec& x) const override;
    // Each piece map sends its region onto itself, so the piece holding y
    // also holds the preimage.
    Vec inverse(const Vec& y, double tol) const override;
    std::vector<Region> seams() const override;

    const std::vector<Piece>& pieces() const { return pieces_; }
    const Region& ambient() const { return ambient_; }
    std::optional<std::size_t> piece_of(const Vec& x) const;

  private:
    int dim_;
    std::vector<Piece> pieces_;
    Region ambient_;
    BoxIndex index_;
};

// Validates disjointness, containment and boundary fixing by sampling.
PiecewiseDeformation glue(std::vector<Piece> pieces, Region ambient, std::size_t boundary_samples = 256,
                          std::uint64_t seed = 1);

// Random point on the topological boundary of a region, exact coordinates.
std::optional<QVec> sample_boundary_point(const Region& r, const BoundaryDistanceField& field, std::mt19937_64& rng);

struct LinkedReport {
    CheckResult check{"linked"};
    std::size_t passed = 0;
    std::size_t failed = 0;
    bool certified = true;
};

// For sampled x in A and y in B, looks for z in A cap B with
// ||x - z|| + ||z - y|| = ||x - y||. Under the sup norm the set of such z is
// the union over a of B_a(x) cap B_{D-a}(y), so the search is an exact
// interval computation per box of A cap B.
LinkedReport check_linked(const Region& a, const Region& b, std::size_t samples, std::uint64_t seed);
std::optional<QVec> between_point(const Region& ab, const QVec& x, const QVec& y);

struct QuotientSample {
    Vec x;
    Vec y;
    double quotient;
};

struct LipschitzEstimate {
    double k1 = 0.0;
    double k2 = 0.0;
    std::size_t pairs = 0;
};

LipschitzEstimate estimate_bi_lipschitz(const PointMap& map, const Region& domain, std::size_t pairs,
                                        std::uint64_t seed, std::vector<QuotientSample>* sink = nullptr);
void write_quotients_csv(std::ostream& os, const std::vector<QuotientSample>& samples);

// Uniform point of a region (box chosen by volume).
Vec sample_region(const Region& r, std::mt19937_64& rng);

}  // namespace specflow
