#include "specflow/gridflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <unordered_map>

namespace specflow {

GridParams choose_constants(double alpha) {
    if (!std::isfinite(alpha) || !(alpha > 1.0)) throw DomainError("alpha: must be a finite number > 1");
    GridParams p;
    p.alpha = alpha;
    std::int64_t k = 1;
    while (!(1.0 - 0.5 / static_cast<double>(k) > 1.0 / alpha)) {
        k *= 2;
        if (k > (std::int64_t{1} << 20)) throw DomainError("alpha: too close to 1 (K would exceed 2^20)");
    }
    p.K = Coord::from_int(k);
    return p;
}

QVec snap_vector(const QVec& s, Coord R) {
    if (R < Coord::ratio(1, 2)) throw DomainError("snap_vector: R must be at least 1/2");
    QVec v(s.dim());
    for (int k = 0; k < s.dim(); ++k) v[k] = Coord::from_int((s[k] - Coord::ratio(1, 2)).ceil_int()) - s[k];
    return v;
}

Vec snap_vector(const Vec& s, double R) {
    if (!(R >= 0.5)) throw DomainError("snap_vector: R must be at least 1/2");
    Vec v(s.dim());
    for (int k = 0; k < s.dim(); ++k) v[k] = std::ceil(s[k] - 0.5) - s[k];
    return v;
}

// ---------------------------------------------------------------- nested shift

NestedShift::NestedShift(ShiftSpec spec, QVec s, std::shared_ptr<const PointMap> inner)
    : h_(std::move(spec)), s_(std::move(s)), sd_(to_vec(s_)), inner_(std::move(inner)) {}

Vec NestedShift::apply(const Vec& r) const {
    const double d = h_.distance_to_boundary(r);
    const double k = h_.K();
    if (d >= k) {
        if (inner_) return inner_->apply(r - sd_) + sd_ + h_.shift();
        return r + h_.shift();
    }
    return r + (d / k) * h_.shift();
}

Vec NestedShift::inverse(const Vec& y, double tol) const {
    Vec u = y - h_.shift();
    if (h_.distance_to_boundary(u) >= h_.K()) {
        if (inner_) return inner_->inverse(u - sd_, tol) + sd_;
        return u;
    }
    return h_.inverse(y, tol);
}

std::vector<Region> NestedShift::seams() const {
    std::vector<Region> out = h_.seams();
    if (inner_)
        for (const Region& r : inner_->seams()) out.push_back(r.translated(s_));
    return out;
}

// ---------------------------------------------------------------- atlas

Vec DeformationAtlas::psi(ClassRef c, const Vec& x) const {
    const AtlasEntry& e = at(c);
    return e.g->apply(x - to_vec(e.anchor));
}

Vec DeformationAtlas::psi_inverse(ClassRef c, const Vec& p, double tol) const {
    const AtlasEntry& e = at(c);
    return e.g->inverse(p, tol) + to_vec(e.anchor);
}

namespace {

struct SignatureHash {
    std::size_t operator()(const ConfigSignature& s) const { return s.hash(); }
};

std::string ref_str(ClassRef r) { return "level " + std::to_string(r.level) + " class " + std::to_string(r.index); }

}  // namespace

DeformationAtlas build_atlas(const PASequence& seq, const GridParams& params) {
    if (!(params.R < params.K)) throw DomainError("K: must exceed the covering radius R");
    DeformationAtlas atlas;
    atlas.params = params;
    atlas.dim = seq.dim;
    const int d = seq.dim;
    auto identity = std::make_shared<const PiecewiseDeformation>(d, std::vector<Piece>{}, Region(d));
    bool identity_used = false;
    std::unordered_map<ConfigSignature, std::shared_ptr<const PiecewiseDeformation>, SignatureHash> cache;

    atlas.levels.resize(seq.levels.size());
    for (int n = 0; n <= seq.top(); ++n) {
        const auto& classes = seq.levels[n].classes;
        auto& out = atlas.levels[n];
        out.reserve(classes.size());
        for (std::size_t i = 0; i < classes.size(); ++i) {
            const PAClass& c = classes[i];
            AtlasEntry e;
            e.ref = ClassRef{n, i};
            e.anchor = c.anchor;
            e.image = c.region.translated(-c.anchor);
            e.core = shrink(e.image, params.K);
            for (const ClassRef& ch : c.children) {
                const PAClass& D = seq.at(ch);
                QVec s = D.anchor - c.anchor;
                QVec v = snap_vector(s, params.R);
                if (params.R < norm(v))
                    throw ConstructionError(ref_str(e.ref) + ": snapping vector " + to_string(v) + " exceeds R");
                e.children.push_back(ChildShift{ch, s, v});
            }
            if (e.children.empty()) {
                e.g = identity;
                identity_used = true;
                out.push_back(std::move(e));
                continue;
            }
            ConfigSignature sig = config_signature(seq, e.ref);
            auto it = cache.find(sig);
            if (it != cache.end()) {
                e.g = it->second;
                out.push_back(std::move(e));
                continue;
            }
            std::vector<Piece> pieces;
            for (const ChildShift& cs : e.children) {
                const PAClass& D = seq.at(cs.child);
                Region a = D.region.translated(-c.anchor);
                if (!e.core.contains(a))
                    throw ConstructionError(ref_str(e.ref) + ": child " + ref_str(cs.child) +
                                            " is not inside the core C' (toast K below grid K = " + params.K.str() +
                                            "?)");
                const auto& inner_g = atlas.at(cs.child).g;
                std::shared_ptr<const PointMap> inner;
                if (!inner_g->pieces().empty()) inner = inner_g;
                ShiftSpec spec{a, params.K, cs.v, params.K};
                pieces.push_back(Piece{a, std::make_shared<const NestedShift>(std::move(spec), cs.s, std::move(inner))});
            }
            try {
                auto g = std::make_shared<const PiecewiseDeformation>(glue(std::move(pieces), e.core, 16, 1 + i));
                cache.emplace(std::move(sig), g);
                e.g = std::move(g);
            } catch (const DomainError& err) {
                throw ConstructionError(ref_str(e.ref) + ": " + err.what());
            }
            out.push_back(std::move(e));
        }
    }
    atlas.distinct_maps = cache.size() + (identity_used ? 1 : 0);
    return atlas;
}

// ---------------------------------------------------------------- grid

std::uint64_t IntegerGrid::total() const {
    std::uint64_t t = 0;
    for (const auto& lv : classes)
        for (const auto& c : lv) t += c.points;
    return t;
}

IntegerGrid extract_grid(const DeformationAtlas& atlas, double tol, double forward_tol) {
    IntegerGrid grid;
    grid.classes.resize(atlas.levels.size());
    std::int64_t numeric = 0, identity = 0;
    for (int n = 0; n <= atlas.top(); ++n) {
        auto& out = grid.classes[n];
        out.resize(atlas.levels[n].size());
        for (std::size_t i = 0; i < atlas.levels[n].size(); ++i) {
            const AtlasEntry& e = atlas.levels[n][i];
            ClassGrid& cg = out[i];
            cg.points = count_integer_points(e.core);
            std::uint64_t evaluated = 0;
            for (const Piece& piece : e.g->pieces()) {
                for_each_integer_point(piece.region, [&](const IVec& p) {
                    Vec y = to_vec(p);
                    Vec z = piece.map->inverse(y, tol);
                    double err = norm(piece.map->apply(z) - y);
                    ++evaluated;
                    cg.max_forward_error = std::max(cg.max_forward_error, err);
                    if (!(err <= forward_tol))
                        grid.check.fail(ref_str(e.ref) + ": grid point over " + to_string(p) + " maps off Z^d by " +
                                        std::to_string(err));
                });
            }
            cg.identity_points = cg.points - evaluated;
            numeric += static_cast<std::int64_t>(evaluated);
            identity += static_cast<std::int64_t>(cg.identity_points);
            grid.check.max_error = std::max(grid.check.max_error, cg.max_forward_error);
        }
    }
    grid.check.samples = static_cast<std::uint64_t>(numeric + identity);
    grid.check.counts["evaluated_points"] = numeric;
    grid.check.counts["identity_points"] = identity;
    for (int n = 0; n <= atlas.top(); ++n) {
        std::int64_t c = 0;
        for (const auto& g : grid.classes[n]) c += static_cast<std::int64_t>(g.points);
        grid.check.counts["level" + std::to_string(n) + "_points"] = c;
    }
    grid.check.note = "points outside every piece are fixed exactly by g and counted without evaluation";
    return grid;
}

CheckResult check_child_shifts(const DeformationAtlas& atlas, std::size_t samples_per_child, std::uint64_t seed, double tol) {
    CheckResult r("child_shifts");
    std::mt19937_64 rng(seed);
    std::int64_t exact_ok = 0;
    for (int n = 1; n <= atlas.top(); ++n)
        for (const AtlasEntry& e : atlas.levels[n])
            for (const ChildShift& cs : e.children) {
                QVec t = cs.s + cs.v;
                bool integral = std::all_of(t.begin(), t.end(), [](Coord c) { return c.is_integer(); });
                if (!integral) r.fail(ref_str(e.ref) + ": s + v = " + to_string(t) + " is not integral");
                if (atlas.params.R < norm(cs.v)) r.fail(ref_str(e.ref) + ": ||v|| exceeds R");
                if (integral) ++exact_ok;
                const AtlasEntry& de = atlas.at(cs.child);
                if (de.core.empty()) continue;
                const Vec tv = to_vec(t), ca = to_vec(de.anchor);
                for (std::size_t k = 0; k < samples_per_child; ++k) {
                    Vec x = k == 0 ? ca : sample_region(de.core, rng) + ca;
                    double err = norm(atlas.psi(e.ref, x) - atlas.psi(cs.child, x) - tv);
                    ++r.samples;
                    r.max_error = std::max(r.max_error, err);
                    if (!(err <= tol)) r.fail(ref_str(e.ref) + ": psi_parent - psi_child - (s + v) = " + std::to_string(err) + " at " + to_string(x));
                }
            }
    r.counts["integral_shifts"] = exact_ok;
    return r;
}

namespace {

struct Descendant {
    ClassRef ref;
    QVec offset;  // psi_n - psi_m on the descendant's core, exactly
};

void collect_descendants(const DeformationAtlas& atlas, const AtlasEntry& e, const QVec& offset,
                         std::vector<Descendant>& out) {
    for (const ChildShift& cs : e.children) {
        QVec off = offset + cs.s + cs.v;
        out.push_back(Descendant{cs.child, off});
        collect_descendants(atlas, atlas.at(cs.child), off, out);
    }
}

// Every stride-th integer point of a region, at most `cap` of them.
std::vector<IVec> spread_points(const Region& r, std::size_t cap) {
    std::vector<IVec> out;
    if (cap == 0 || r.empty()) return out;
    std::uint64_t n = count_integer_points(r);
    if (n == 0) return out;
    std::uint64_t stride = std::max<std::uint64_t>(1, n / cap);
    std::uint64_t i = 0;
    for_each_integer_point(r, [&](const IVec& p) {
        if (i % stride == 0 && out.size() < cap) out.push_back(p);
        ++i;
    });
    return out;
}

double distance_to_region(const Region& r, const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Box& b : r.boxes()) best = std::min(best, distance(b, x));
    return best;
}

}  // namespace

CheckResult check_nesting(const DeformationAtlas& atlas, const PASequence& seq, std::size_t points_per_class,
                          double tol) {
    CheckResult r("grid_nesting");
    std::int64_t pairs = 0;
    for (int n = 1; n <= atlas.top(); ++n)
        for (const AtlasEntry& e : atlas.levels[n]) {
            std::vector<Descendant> desc;
            collect_descendants(atlas, e, QVec(atlas.dim), desc);
            std::size_t contained = 0;
            auto groups = seq.contained(e.ref);
            for (int m = 0; m < n && m < static_cast<int>(groups.size()); ++m) contained += groups[m].size();
            if (contained != desc.size())
                r.fail(ref_str(e.ref) + ": " + std::to_string(contained) + " contained classes but " +
                       std::to_string(desc.size()) + " reachable through children");
            const Vec ca = to_vec(e.anchor);
            for (const Descendant& dsc : desc) {
                ++pairs;
                const AtlasEntry& de = atlas.at(dsc.ref);
                for (const IVec& p : spread_points(de.core, points_per_class)) {
                    Vec z = atlas.psi_inverse(dsc.ref, to_vec(p));
                    if (distance_to_region(e.core, z - ca) > 1e-9) {
                        r.fail(ref_str(dsc.ref) + " grid point " + to_string(z) + " is outside C' of " + ref_str(e.ref));
                        continue;
                    }
                    Vec want = to_vec(p) + to_vec(dsc.offset);
                    double err = norm(atlas.psi(e.ref, z) - want);
                    ++r.samples;
                    r.max_error = std::max(r.max_error, err);
                    if (!(err <= tol))
                        r.fail(ref_str(dsc.ref) + " grid point " + to_string(z) + " misses Z_" + std::to_string(n) +
                               " by " + std::to_string(err));
                }
            }
        }
    r.counts["containments"] = pairs;
    r.note = "each contained class contributes up to " + std::to_string(points_per_class) + " grid points";
    return r;
}

CheckResult check_onto(const DeformationAtlas& atlas, std::size_t samples_per_class, std::uint64_t seed, double tol) {
    CheckResult r("onto");
    std::mt19937_64 rng(seed);
    for (int n = 1; n <= atlas.top(); ++n)
        for (const AtlasEntry& e : atlas.levels[n]) {
            const auto& pieces = e.g->pieces();
            if (pieces.empty() || e.core.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
            for (std::size_t k = 0; k < samples_per_class; ++k) {
                Vec q = k % 2 == 0 ? sample_region(e.core, rng) : sample_region(pieces[pick(rng)].region, rng);
                Vec x = e.g->inverse(q, 1e-10);
                double err = norm(e.g->apply(x) - q);
                double out = distance_to_region(e.core, x);
                ++r.samples;
                r.max_error = std::max(r.max_error, err);
                if (!(err <= tol) || out > 1e-9)
                    r.fail(ref_str(e.ref) + ": no preimage found for " + to_string(q) + " (residual " +
                           std::to_string(err) + ")");
            }
        }
    return r;
}

// ---------------------------------------------------------------- cocycles

std::optional<Vec> GridCocycle::rho21(const Vec& r, const Vec& x) const {
    const AtlasEntry& e = atlas_->at(c_);
    Vec u = x - to_vec(e.anchor);
    if (!e.core.contains(u) || !e.core.contains(u + r)) return std::nullopt;
    return e.g->apply(u + r) - e.g->apply(u);
}

std::optional<Vec> GridCocycle::rho12(const Vec& r, const Vec& x) const {
    const AtlasEntry& e = atlas_->at(c_);
    Vec u = x - to_vec(e.anchor);
    if (!e.core.contains(u)) return std::nullopt;
    Vec p = e.g->apply(u) + r;
    if (!e.core.contains(p)) return std::nullopt;
    return e.g->inverse(p, 1e-10) - u;
}

CheckResult check_cocycle_roundtrip(const DeformationAtlas& atlas, std::size_t samples, std::uint64_t seed, double tol) {
    CheckResult r("cocycle_roundtrip");
    std::mt19937_64 rng(seed);
    std::vector<ClassRef> pool;
    for (int n = atlas.top(); n >= 1 && pool.size() < 64; --n)
        for (const AtlasEntry& e : atlas.levels[n])
            if (!e.g->pieces().empty() && pool.size() < 64) pool.push_back(e.ref);
    if (pool.empty())
        for (const AtlasEntry& e : atlas.levels.back())
            if (!e.core.empty()) pool.push_back(e.ref);
    if (pool.empty()) {
        r.note = "no class with a nonempty core";
        return r;
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_real_distribution<double> step(-3.0, 3.0);
    std::size_t undefined = 0;
    for (std::size_t k = 0; k < samples;) {
        ClassRef c = pool[pick(rng)];
        const AtlasEntry& e = atlas.at(c);
        GridCocycle gc(atlas, c);
        Vec x = sample_region(e.core, rng) + to_vec(e.anchor);
        Vec rv(atlas.dim);
        for (auto& t : rv) t = step(rng);
        if (k == 0) rv = Vec(atlas.dim);
        auto a = gc.rho21(rv, x);
        std::optional<Vec> b;
        if (a) b = gc.rho12(*a, x);
        if (!b) {
            if (++undefined > 20 * samples + 100) break;
            continue;
        }
        double err = norm(*b - rv);
        if (k == 0) err = std::max(err, norm(*a));
        ++r.samples;
        ++k;
        r.max_error = std::max(r.max_error, err);
        if (!(err <= tol)) r.fail("round trip error " + std::to_string(err) + " at " + to_string(x));
    }
    r.counts["undefined"] = static_cast<std::int64_t>(undefined);
    if (r.samples < samples) r.fail("only " + std::to_string(r.samples) + " defined samples");
    return r;
}

// ---------------------------------------------------------------- Z^d action

namespace {

struct OrbitHash {
    std::size_t operator()(const OrbitPoint& z) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL * (z.seed + 1);
        for (std::int64_t c : z.index) {
            h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

struct GridAction::State {
    std::shared_ptr<const DeformationAtlas> atlas;
    std::vector<ClassRef> tops;
    mutable std::unordered_map<OrbitPoint, Vec, OrbitHash> cache;

    bool in_domain(const OrbitPoint& z) const {
        if (z.seed >= tops.size() || z.index.dim() != atlas->dim) return false;
        return atlas->at(tops[z.seed]).core.contains(to_qvec(z.index));
    }
    std::optional<Vec> position(const OrbitPoint& z) const {
        if (!in_domain(z)) return std::nullopt;
        auto it = cache.find(z);
        if (it != cache.end()) return it->second;
        Vec x = atlas->psi_inverse(tops[z.seed], to_vec(z.index));
        cache.emplace(z, x);
        return x;
    }
};

GridAction::GridAction(std::shared_ptr<const DeformationAtlas> atlas)
    : state_(std::make_shared<State>()), atlas_(atlas) {
    state_->atlas = std::move(atlas);
    const DeformationAtlas& a = *state_->atlas;
    if (a.levels.empty()) throw DomainError("grid action: empty atlas");
    std::int64_t radius = 0;
    for (const AtlasEntry& e : a.levels.back()) {
        if (e.core.empty()) continue;
        state_->tops.push_back(e.ref);
        Box h = e.core.hull();
        for (int k = 0; k < a.dim; ++k)
            radius = std::max({radius, h.hi[k].ceil_int(), -h.lo[k].floor_int()});
    }
    if (state_->tops.empty()) throw DomainError("grid action: no top-level class has a nonempty core");
    auto st = state_;
    system_ = ZdSystem(a.dim, st->tops.size(), radius, [st](const OrbitPoint& z) { return st->in_domain(z); });
}

Cocycle GridAction::cocycle() const {
    Cocycle c;
    c.dim = state_->atlas->dim;
    auto st = state_;
    c.eval = [st](const IVec& n, const OrbitPoint& z) -> std::optional<Vec> {
        auto a = st->position(z);
        if (!a) return std::nullopt;
        OrbitPoint w{z.seed, z.index + n};
        auto b = st->position(w);
        if (!b) return std::nullopt;
        return *b - *a;
    };
    c.domain_radius = system_.radius();
    c.claimed_k1 = 1.0 / state_->atlas->params.alpha;
    c.claimed_k2 = state_->atlas->params.alpha;
    c.label = "grid";
    return c;
}

std::optional<Vec> GridAction::position(const OrbitPoint& z) const { return state_->position(z); }

ClassRef GridAction::seed_class(std::uint32_t seed) const { return state_->tops.at(seed); }

std::optional<std::uint32_t> GridAction::seed_of(const Vec& x) const {
    const DeformationAtlas& a = *state_->atlas;
    for (std::uint32_t s = 0; s < state_->tops.size(); ++s) {
        const AtlasEntry& e = a.at(state_->tops[s]);
        if (e.core.contains(x - to_vec(e.anchor))) return s;
    }
    return std::nullopt;
}

std::optional<OrbitPoint> GridAction::nearest(const Vec& x) const {
    auto s = seed_of(x);
    if (!s) return std::nullopt;
    Vec p = state_->atlas->psi(state_->tops[*s], x);
    OrbitPoint z{*s, IVec(p.dim())};
    for (int k = 0; k < p.dim(); ++k) z.index[k] = static_cast<std::int64_t>(std::llround(p[k]));
    if (!state_->in_domain(z)) return std::nullopt;
    return z;
}

Report verify_integer_grid(const GridAction& action, std::size_t samples, std::uint64_t seed, double tol) {
    Report rep;
    rep.command = "integer_grid";
    const DeformationAtlas& atlas = action.atlas();
    const int d = atlas.dim;
    std::mt19937_64 rng(seed);
    const double alpha = atlas.params.alpha;

    CheckResult closure("grid_closure");
    CheckResult coset("grid_coset");
    std::size_t seeds = action.system().seeds();
    for (std::uint32_t s = 0; s < seeds; ++s) {
        OrbitPoint base = action.system().base(s);
        auto anchor_pos = action.position(base);
        if (!anchor_pos) {
            closure.fail("seed " + std::to_string(s) + " has no base grid point");
            continue;
        }
        ClassRef top = action.seed_class(s);
        const AtlasEntry& te = atlas.at(top);
        Region inner = shrink(te.core, Coord(1));
        std::size_t done = 0;
        for (int attempt = 0; done < samples && attempt < static_cast<int>(samples) * 20 && !inner.empty(); ++attempt) {
            Vec q = sample_region(inner, rng);
            OrbitPoint z{s, IVec(d)};
            for (int k = 0; k < d; ++k) z.index[k] = static_cast<std::int64_t>(std::llround(q[k]));
            if (!inner.contains(to_qvec(z.index))) continue;
            ++done;
            Vec x = *action.position(z);
            for (int j = 0; j < d; ++j)
                for (int sign : {-1, 1}) {
                    OrbitPoint w = z;
                    w.index[j] += sign;
                    auto y = action.position(w);
                    ++closure.samples;
                    if (!y) {
                        closure.fail("grid point " + to_string(z) + " has no neighbour along e_" + std::to_string(j));
                        continue;
                    }
                    double err = norm(atlas.psi(top, *y) - to_vec(w.index));
                    double step = norm(*y - x);
                    closure.max_error = std::max(closure.max_error, err);
                    if (!(err <= tol) || !(step >= (1.0 / alpha) * (1 - 1e-9)))
                        closure.fail("neighbour of " + to_string(z) + " along e_" + std::to_string(j) +
                                     " misses the grid (error " + std::to_string(err) + ")");
                }
        }
        // Lower-level grids inside the class share its integer coset.
        std::vector<Descendant> desc;
        collect_descendants(atlas, te, QVec(d), desc);
        if (desc.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, desc.size() - 1);
        for (std::size_t k = 0; k < samples; ++k) {
            const Descendant& dsc = desc[pick(rng)];
            const AtlasEntry& de = atlas.at(dsc.ref);
            if (de.core.empty()) continue;
            Vec q = sample_region(de.core, rng);
            IVec p(d);
            for (int i = 0; i < d; ++i) p[i] = static_cast<std::int64_t>(std::floor(q[i]));
            if (!de.core.contains(to_qvec(p))) continue;
            Vec z = atlas.psi_inverse(dsc.ref, to_vec(p));
            Vec img = atlas.psi(top, z);
            double err = 0.0;
            for (int i = 0; i < d; ++i) err = std::max(err, std::abs(img[i] - std::round(img[i])));
            ++coset.samples;
            coset.max_error = std::max(coset.max_error, err);
            if (!(err <= tol)) coset.fail("grid point " + to_string(z) + " leaves the integer coset by " + std::to_string(err));
        }
    }
    closure.counts["violations"] += 0;
    coset.counts["violations"] += 0;
    rep.add(closure);
    rep.add(coset);
    return rep;
}

}  // namespace specflow
