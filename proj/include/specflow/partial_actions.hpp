#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "specflow/geometry.hpp"
#include "specflow/report.hpp"

namespace specflow {

class NotInDomain : public DomainError {
  public:
    using DomainError::DomainError;
};

class MalformedSequence : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ClassRef {
    int level = 0;
    std::size_t index = 0;
    friend auto operator<=>(const ClassRef&, const ClassRef&) = default;
};

// One class of a partial action: phi(x) = x - anchor on region.
struct PAClass {
    std::size_t id = 0;
    int level = 0;
    Region region;
    QVec anchor;
    std::vector<ClassRef> children;
};

class PALevel {
  public:
    std::vector<PAClass> classes;

    // Index of the class containing x; throws MalformedSequence when two do.
    std::optional<std::size_t> locate(const QVec& x) const;
    std::optional<std::size_t> locate(const Vec& x) const;
    // Classes whose region meets b.
    std::vector<std::size_t> meeting(const Box& b) const;
    // Boxes of all class regions; classes are disjoint so this decomposes X_n.
    std::vector<Box> domain_boxes() const;
    Region domain(int dim) const;

    void build_index(int dim);

  private:
    template <class P>
    std::optional<std::size_t> locate_impl(const P& x) const;

    BoxIndex index_;
    bool indexed_ = false;
};

class PASequence {
  public:
    int dim = 1;
    std::vector<PALevel> levels;

    int top() const { return static_cast<int>(levels.size()) - 1; }
    const PAClass& at(ClassRef r) const { return levels.at(r.level).classes.at(r.index); }
    // Builds lookup indices and checks the structural invariants of every
    // class (anchor in region, children disjoint, lower level, contained).
    void finalize();
    // Every class at levels <= n contained in c, grouped by level.
    std::vector<std::vector<std::size_t>> contained(ClassRef c) const;
};

Vec phi(const PASequence& seq, int n, const Vec& x);
QVec phi(const PASequence& seq, int n, const QVec& x);
std::optional<Vec> act_on(const PASequence& seq, int n, const Vec& g, const Vec& x);
std::optional<QVec> act_on(const PASequence& seq, int n, const QVec& g, const QVec& x);

CheckResult check_monotonicity(const PASequence& seq);

struct ShiftRecord {
    ClassRef inner;
    ClassRef outer;
    QVec shift;
};

struct CoherenceReport {
    CheckResult check{"coherence"};
    std::vector<ShiftRecord> shifts;
};

CoherenceReport check_coherence(const PASequence& seq, std::size_t samples_per_class = 4,
                                std::uint64_t seed = 1);

struct ExhaustivenessReport {
    CheckResult check{"exhaustiveness"};
    double coverage = 0.0;
    std::size_t satisfied = 0;
    std::size_t tested = 0;
};

// Bounded certification: only the offered (x, g) pairs are examined.
ExhaustivenessReport check_exhaustiveness(const PASequence& seq, const std::vector<Vec>& xs,
                                          const std::vector<Vec>& gs, double required_coverage = 1.0);

// Totalization of a monotone sequence: points outside every X_m with m <= n
// form singleton classes with phi = 0.
class HatSequence {
  public:
    explicit HatSequence(const PASequence& seq) : seq_(&seq) {}

    std::optional<ClassRef> class_of(int n, const Vec& x) const;
    Vec phi(int n, const Vec& x) const;
    bool same_class(int n, const Vec& x, const Vec& y) const;

  private:
    const PASequence* seq_;
};

// Translated images of all classes inside c, canonical per level.
struct ConfigSignature {
    int level = 0;
    std::vector<std::vector<std::pair<Region, QVec>>> per_level;

    friend bool operator==(const ConfigSignature&, const ConfigSignature&) = default;
    std::size_t hash() const;
};

ConfigSignature config_signature(const PASequence& seq, ClassRef c);
bool equivalent_configs(const ConfigSignature& a, const ConfigSignature& b);

struct ChainBersParams {
    Coord window_lo = 0;
    Coord window_hi = 100;
    std::uint64_t seed = 1;
    int levels = -1;                      // -1: enough levels to merge every cell
    std::int64_t lattice_resolution = 8;  // points on (1/res)Z
};

struct ChainBersResult {
    PASequence sequence;
    PointSet cross_section;
    std::vector<Box> voronoi;   // Voronoi interval of each cross-section point
    std::vector<QVec> residual; // Voronoi boundary points, outside every X_n
    std::vector<Coord> eps;     // eps_n = 2^{-n-2}
};

ChainBersResult build_chain_bers_1d(const ChainBersParams& p);
Report verify_chain_bers(const ChainBersResult& r);

}  // namespace specflow
