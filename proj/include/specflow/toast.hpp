#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "specflow/partial_actions.hpp"

namespace specflow {

class ConstructionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ToastParams {
    int dim = 2;
    Coord K = 1;
    std::int64_t gamma = 20;
    int levels = 1;
    std::optional<Box> window;  // default: cube of half-side 1.1 a_N at the origin
    std::uint64_t seed = 1;
    std::int64_t lattice_resolution = 8;  // cross-section points on (1/res)Z^d

    // a_n = K gamma^{n+1}
    Coord radius(int n) const;
    Box effective_window() const;
    // Throws DomainError naming the offending field.
    void validate() const;
};

struct ToastHierarchy {
    ToastParams params;
    Box window;
    std::vector<PointSet> cross_sections;
    PASequence sequence;
};

std::vector<PointSet> generate_cross_sections(const ToastParams& p);
ToastHierarchy build_toast(const ToastParams& p, std::vector<PointSet> cross_sections);
ToastHierarchy build_toast(const ToastParams& p);

Report verify_toast_invariants(const ToastHierarchy& h);

struct CoverageReport {
    CheckResult check{"coverage"};
    double fraction = 0.0;
    Box interior;
};

// Fraction of sampled window points, at least `margin` from the window
// boundary, lying in some class of any level.
CoverageReport toast_coverage(const ToastHierarchy& h, std::size_t samples, std::uint64_t seed,
                              std::optional<Coord> margin = std::nullopt, double required = 0.0);

}  // namespace specflow
