#include "specflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace specflow {

namespace {

CheckResult failed(const std::string& name, const std::string& why) {
    CheckResult c(name);
    c.fail(why);
    return c;
}

}  // namespace

Report run_gridflow(const GridflowParams& p, GridflowBuild* out) {
    Report rep;
    rep.command = "gridflow";
    GridParams gp = choose_constants(p.alpha);
    ToastParams tp = p.toast;
    if (p.match_toast_k) tp.K = max(tp.K, gp.K);

    auto toast = std::make_shared<ToastHierarchy>(build_toast(tp));
    rep.append(verify_toast_invariants(*toast), "toast");

    std::shared_ptr<DeformationAtlas> atlas;
    CheckResult ac("atlas");
    try {
        atlas = std::make_shared<DeformationAtlas>(build_atlas(toast->sequence, gp));
    } catch (const ConstructionError& e) {
        ac.fail(e.what());
        rep.add(ac);
        return rep;
    }
    ac.metrics["alpha"] = gp.alpha;
    ac.metrics["R"] = gp.R.to_double();
    ac.metrics["K"] = gp.K.to_double();
    ac.metrics["alpha_minus"] = 1.0 - gp.R.to_double() / gp.K.to_double();
    ac.metrics["alpha_plus"] = 1.0 + gp.R.to_double() / gp.K.to_double();
    ac.counts["distinct_maps"] = static_cast<std::int64_t>(atlas->distinct_maps);
    for (int n = 0; n <= atlas->top(); ++n) {
        ac.counts["level" + std::to_string(n) + "_classes"] = static_cast<std::int64_t>(atlas->levels[n].size());
        std::int64_t kids = 0;
        for (const auto& e : atlas->levels[n]) kids += static_cast<std::int64_t>(e.children.size());
        ac.counts["level" + std::to_string(n) + "_children"] = kids;
    }
    ac.samples = 1;
    rep.add(ac);

    IntegerGrid grid = extract_grid(*atlas);
    rep.add(grid.check);
    rep.add(check_child_shifts(*atlas, p.child_shift_samples, p.seed));
    rep.add(check_nesting(*atlas, toast->sequence, p.nesting_points));
    rep.add(check_onto(*atlas, p.onto_samples, p.seed + 1));
    rep.add(check_cocycle_roundtrip(*atlas, p.roundtrip_samples, p.seed + 2));

    std::shared_ptr<GridAction> action;
    try {
        action = std::make_shared<GridAction>(atlas);
    } catch (const DomainError& e) {
        rep.add(failed("grid_action", e.what()));
        return rep;
    }
    rep.append(verify_integer_grid(*action, p.closure_samples, p.seed + 3));
    Cocycle rho = action->cocycle();
    rep.add(check_cocycle_identity(rho, action->system(), p.cocycle_samples / 10, p.seed + 4));
    auto cc = estimate_cocycle_constants(rho, action->system(), p.cocycle_samples, p.cocycle_step, p.seed + 5,
                                         1.0 / p.alpha, p.alpha);
    rep.add(cc.check);
    AdmissibleOptions ao;
    ao.seed = p.seed + 6;
    rep.add(check_admissible(rho, action->system(), std::min<std::int64_t>(p.cocycle_step, rho.domain_radius), ao));

    if (out) {
        out->toast = toast;
        out->atlas = atlas;
        out->action = action;
        out->grid = std::move(grid);
    }
    return rep;
}

// ---------------------------------------------------------------- Katok

KatokMap::KatokMap(std::shared_ptr<const GridAction> action)
    : action_(std::move(action)), ext_(action_->system(), negated(action_->cocycle())) {}

std::optional<QuotientPoint> KatokMap::operator()(const Vec& x) const {
    auto z0 = action_->nearest(x);
    if (!z0) return std::nullopt;
    auto g = action_->position(*z0);
    if (!g) return std::nullopt;
    return ext_.canonicalize(*z0, x - *g);
}

Report katok_pipeline(const KatokParams& p) {
    Report rep;
    rep.command = "katok";
    if (p.dim < 1 || p.dim > kMaxDim) throw DomainError("d: must be between 1 and 3");
    GridflowParams gp;
    gp.alpha = p.alpha;
    gp.seed = p.seed;
    gp.toast.dim = p.dim;
    gp.toast.gamma = p.gamma;
    gp.toast.levels = p.levels;
    gp.toast.seed = p.seed;
    gp.toast.window = p.window;
    if (!gp.toast.window && p.dim == 1) gp.toast.window = Box(QVec{Coord(-5000)}, QVec{Coord(5000)});
    gp.roundtrip_samples = 2000;
    gp.cocycle_samples = 5000;

    GridflowBuild build;
    Report grid = run_gridflow(gp, &build);
    rep.append(grid, "grid");
    if (!build.action) return rep;

    const GridAction& action = *build.action;
    const DeformationAtlas& atlas = *build.atlas;
    KatokMap theta(build.action);
    const PrincipalExtension& ext = theta.extension();
    const Cocycle& rho = ext.cocycle();
    const int d = p.dim;

    auto cc = estimate_cocycle_constants(rho, ext.system(), 20000, 6, p.seed + 11, 1.0 / p.alpha, p.alpha);
    cc.check.name = "flow.cocycle_bilipschitz";
    rep.add(cc.check);
    CheckResult ident = check_cocycle_identity(rho, ext.system(), 2000, p.seed + 12);
    ident.name = "flow.cocycle_identity";
    rep.add(ident);
    CheckResult dual = duality_check(ext, 1000, 4, p.seed + 13);
    dual.name = "flow.duality";
    rep.add(dual);

    // Sample regions: top cores shrunk so every flow step and search ball stays defined.
    const Coord margin = Coord::from_int(static_cast<std::int64_t>(std::ceil(p.max_flow)) + 8);
    std::vector<std::pair<std::uint32_t, Region>> pools;
    for (std::uint32_t s = 0; s < action.system().seeds(); ++s) {
        const AtlasEntry& e = atlas.at(action.seed_class(s));
        Region inner = shrink(e.core, margin);
        if (!inner.empty()) pools.emplace_back(s, inner.translated(e.anchor));
    }
    CheckResult eq("flow.equivariance");
    CheckResult inj("flow.injectivity");
    if (pools.empty()) {
        eq.fail("no top-level class is large enough to sample from");
        rep.add(eq);
        rep.add(inj);
        return rep;
    }
    std::mt19937_64 rng(p.seed + 14);
    std::uniform_int_distribution<std::size_t> pick(0, pools.size() - 1);
    std::uniform_real_distribution<double> flow(-p.max_flow, p.max_flow);
    std::map<OrbitPoint, std::vector<std::pair<Vec, Vec>>> images;  // z -> (r, x)
    std::size_t unverified = 0;
    for (std::size_t i = 0; i < p.samples; ++i) {
        Vec x = sample_region(pools[pick(rng)].second, rng);
        Vec s(d);
        for (auto& c : s) c = flow(rng);
        auto a = theta(x);
        auto b = theta(x + s);
        ++eq.samples;
        if (!a || !b) {
            eq.fail("Theta undefined near " + to_string(x));
            continue;
        }
        QuotientPoint moved = ext.flow_act(*a, s);
        if (!a->verified || !b->verified || !moved.verified) ++unverified;
        double err = moved.z == b->z ? norm(moved.r - b->r) : std::numeric_limits<double>::infinity();
        eq.max_error = std::max(eq.max_error, err);
        if (!(err <= p.tol)) eq.fail("Theta(x + s) differs from Theta(x) + s at x=" + to_string(x) + " s=" + to_string(s));
        images[a->z].emplace_back(a->r, x);
    }
    eq.counts["unverified"] = static_cast<std::int64_t>(unverified);
    if (unverified > 0) eq.fail(std::to_string(unverified) + " canonical forms were not certified");

    for (const auto& [z, list] : images)
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                ++inj.samples;
                if (norm(list[i].first - list[j].first) <= 1e-9 && norm(list[i].second - list[j].second) > 1e-6)
                    inj.fail("Theta identifies " + to_string(list[i].second) + " and " + to_string(list[j].second));
            }
    inj.counts["points"] = static_cast<std::int64_t>(eq.samples);
    inj.counts["distinct_base_points"] = static_cast<std::int64_t>(images.size());
    inj.note = "points sharing a canonical base point are compared pairwise";
    rep.add(eq);
    rep.add(inj);
    return rep;
}

}  // namespace specflow
