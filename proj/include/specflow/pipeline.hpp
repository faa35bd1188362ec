#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "specflow/gridflow.hpp"
#include "specflow/specialflow.hpp"
#include "specflow/toast.hpp"

namespace specflow {

struct GridflowParams {
    ToastParams toast;
    double alpha = 1.25;
    // Raise the toast's K to the grid K so children clear the core.
    bool match_toast_k = true;
    std::size_t child_shift_samples = 4;
    std::size_t nesting_points = 8;
    std::size_t onto_samples = 8;
    std::size_t roundtrip_samples = 10000;
    std::size_t closure_samples = 200;
    std::size_t cocycle_samples = 20000;
    std::int64_t cocycle_step = 6;
    std::uint64_t seed = 1;
};

struct GridflowBuild {
    std::shared_ptr<const ToastHierarchy> toast;
    std::shared_ptr<const DeformationAtlas> atlas;
    std::shared_ptr<const GridAction> action;
    IntegerGrid grid;
};

// Toast, atlas, grid extraction and every grid check. A construction error
// becomes a failed "atlas" check; `out` is filled only on success.
Report run_gridflow(const GridflowParams& p, GridflowBuild* out = nullptr);

struct KatokParams {
    int dim = 1;
    double alpha = 1.25;
    std::uint64_t seed = 1;
    int levels = 1;
    std::int64_t gamma = 20;
    std::optional<Box> window;  // default [-5000, 5000] for d = 1, the toast default otherwise
    std::size_t samples = 1000;
    double max_flow = 5.0;
    double tol = 1e-6;
};

// Theta(x) = pi(z0, x - G(z0)) for a grid point z0 near x, where G is the
// window position of a grid point. Theta is well defined because G(z) + r is
// invariant under That for the cocycle -rho.
class KatokMap {
  public:
    KatokMap(std::shared_ptr<const GridAction> action);
    const PrincipalExtension& extension() const { return ext_; }
    std::optional<QuotientPoint> operator()(const Vec& x) const;

  private:
    std::shared_ptr<const GridAction> action_;
    PrincipalExtension ext_;
};

Report katok_pipeline(const KatokParams& p);

}  // namespace specflow
