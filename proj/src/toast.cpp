#include "specflow/toast.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace specflow {

// ---------------------------------------------------------------- params

Coord ToastParams::radius(int n) const {
    Coord a = K;
    for (int i = 0; i <= n; ++i) {
        if (a.raw() > (std::int64_t{1} << 52) / gamma) throw DomainError("toast radius a_" + std::to_string(n) + " overflows");
        a = a * gamma;
    }
    return a;
}

Box ToastParams::effective_window() const {
    if (window) return *window;
    Coord half = radius(levels).divided(10) * 11;
    return Box::ball(QVec(dim), half);
}

void ToastParams::validate() const {
    if (dim < 1 || dim > kMaxDim) throw DomainError("dimension: must be in 1..3");
    if (!(K > Coord{})) throw DomainError("K: must be > 0");
    if (gamma < 10) throw DomainError("gamma: must be >= 10");
    if (levels < 0) throw DomainError("levels: must be >= 0");
    if (lattice_resolution < 1 || lattice_resolution > (Coord::kOne >> 1) || Coord::kOne % lattice_resolution != 0)
        throw DomainError("lattice_resolution: must be a power of two in 1..2^19");
    for (int n = 0; n <= levels; ++n) {
        try {
            radius(n).divided(10);
        } catch (const DomainError&) {
            throw DomainError("K: a_" + std::to_string(n) + "/10 is not exactly representable");
        }
    }
    Box w = effective_window();
    if (w.dim() != dim) throw DomainError("window: dimension differs from 'dimension'");
    Coord need = radius(levels) * 2;
    for (int k = 0; k < dim; ++k)
        if (w.extent(k) < need) throw DomainError("window: side must be >= 2 a_N = " + need.str());
}

// ---------------------------------------------------------------- cross-sections

namespace {

Coord lattice_floor(Coord x, std::int64_t res) {
    std::int64_t q = Coord::kOne / res;
    std::int64_t r = x.raw();
    std::int64_t f = r >= 0 ? r / q : -((-r + q - 1) / q);
    return Coord::from_raw(f * q);
}

Coord center_of(const Box& w, int k) { return Coord::from_raw((w.lo[k].raw() + w.hi[k].raw()) / 2); }

// Greedy maximal hard-core packing: pairwise distance > a and every window
// point within a of some point. The window center is always the first point.
PointSet pack_level(const ToastParams& p, const Box& w, Coord a, std::mt19937_64& rng) {
    const int d = p.dim;
    PointSet out;
    out.dim = d;
    out.lacunarity_radius = a;
    out.lacunary = true;

    std::array<std::int64_t, kMaxDim> ncell{1, 1, 1};
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        Coord e = w.extent(k);
        ncell[k] = (e.raw() + a.raw() - 1) / a.raw();
        total *= static_cast<std::size_t>(ncell[k]);
    }
    if (total > (std::size_t{1} << 27)) throw DomainError("window: too many packing cells at radius " + a.str());
    std::vector<std::int32_t> home(total, -1);

    auto cell_index = [&](const std::array<std::int64_t, kMaxDim>& c) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * static_cast<std::size_t>(ncell[k]) + static_cast<std::size_t>(c[k]);
        return idx;
    };
    auto cell_coords = [&](std::size_t idx) {
        std::array<std::int64_t, kMaxDim> c{};
        for (int k = d - 1; k >= 0; --k) {
            c[k] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(ncell[k]));
            idx /= static_cast<std::size_t>(ncell[k]);
        }
        return c;
    };
    auto cell_of = [&](const QVec& x) {
        std::array<std::int64_t, kMaxDim> c{};
        for (int k = 0; k < d; ++k)
            c[k] = std::min<std::int64_t>(ncell[k] - 1, (x[k] - w.lo[k]).raw() / a.raw());
        return c;
    };
    auto cell_box = [&](const std::array<std::int64_t, kMaxDim>& c) {
        QVec lo(d), hi(d);
        for (int k = 0; k < d; ++k) {
            lo[k] = w.lo[k] + a * c[k];
            hi[k] = min(w.hi[k], w.lo[k] + a * (c[k] + 1));
        }
        return Box(lo, hi);
    };
    auto place = [&](const QVec& x) {
        home[cell_index(cell_of(x))] = static_cast<std::int32_t>(out.points.size());
        out.points.push_back(x);
    };

    QVec center(d);
    for (int k = 0; k < d; ++k) center[k] = lattice_floor(center_of(w, k), p.lattice_resolution);
    place(center);

    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);

    const Coord step = Coord::ratio(1, p.lattice_resolution);
    std::vector<Box> balls;
    for (std::uint32_t idx : order) {
        if (home[idx] >= 0) continue;
        auto c = cell_coords(idx);
        Box q = cell_box(c);
        if (!q.full()) continue;
        balls.clear();
        std::array<std::int64_t, kMaxDim> lo{}, hi{};
        for (int k = 0; k < d; ++k) {
            lo[k] = std::max<std::int64_t>(0, c[k] - 1);
            hi[k] = std::min<std::int64_t>(ncell[k] - 1, c[k] + 1);
        }
        auto nb = lo;
        while (true) {
            std::int32_t h = home[cell_index(nb)];
            if (h >= 0) balls.push_back(Box::ball(out.points[static_cast<std::size_t>(h)], a));
            int k = d - 1;
            for (; k >= 0; --k) {
                if (++nb[k] <= hi[k]) break;
                nb[k] = lo[k];
            }
            if (k < 0) break;
        }
        std::vector<Box> free = subtract_boxes(q, balls);
        if (free.empty()) continue;
        // Random piece weighted by volume, then a random lattice point strictly
        // inside it; the interiors of the pieces are exactly the points at
        // distance > a from every earlier point.
        std::vector<double> vol(free.size());
        for (std::size_t i = 0; i < free.size(); ++i) {
            double v = 1.0;
            for (int k = 0; k < d; ++k) v *= free[i].extent(k).to_double();
            vol[i] = v;
        }
        std::discrete_distribution<std::size_t> pick(vol.begin(), vol.end());
        std::size_t first = pick(rng);
        std::optional<QVec> chosen;
        for (std::size_t t = 0; t < free.size() && !chosen; ++t) {
            const Box& b = free[(first + t) % free.size()];
            QVec x(d);
            bool ok = true;
            for (int k = 0; k < d && ok; ++k) {
                std::int64_t j0 = lattice_floor(b.lo[k], p.lattice_resolution).raw() / step.raw() + 1;
                std::int64_t j1 = (lattice_floor(b.hi[k], p.lattice_resolution) == b.hi[k])
                                      ? b.hi[k].raw() / step.raw() - 1
                                      : lattice_floor(b.hi[k], p.lattice_resolution).raw() / step.raw();
                if (j0 > j1) {
                    ok = false;
                    break;
                }
                std::uniform_int_distribution<std::int64_t> u(j0, j1);
                x[k] = step * u(rng);
            }
            if (ok) chosen = x;
        }
        if (!chosen) {
            const Box& b = *std::max_element(free.begin(), free.end(), [](const Box& x, const Box& y) {
                double vx = 1, vy = 1;
                for (int k = 0; k < x.dim(); ++k) {
                    vx *= x.extent(k).to_double();
                    vy *= y.extent(k).to_double();
                }
                return vx < vy;
            });
            QVec x(d);
            for (int k = 0; k < d; ++k) x[k] = Coord::from_raw((b.lo[k].raw() + b.hi[k].raw()) / 2);
            chosen = x;
        }
        place(*chosen);
    }
    return out;
}

}  // namespace

std::vector<PointSet> generate_cross_sections(const ToastParams& p) {
    p.validate();
    Box w = p.effective_window();
    std::mt19937_64 rng(p.seed);
    std::vector<PointSet> out;
    for (int n = 0; n <= p.levels; ++n) {
        out.push_back(pack_level(p, w, p.radius(n), rng));
        if (out.back().points.empty()) throw DomainError("window: no cross-section point fits at level " + std::to_string(n));
    }
    return out;
}

// ---------------------------------------------------------------- construction

namespace {

struct LevelWork {
    std::vector<Region> fat;      // region grown by K
    std::vector<std::int64_t> parent_level;  // -1 while maximal
    std::vector<std::size_t> parent;
    std::vector<std::int64_t> owner;  // level-n class index that absorbed it during the current level
    BoxIndex index;
};

void check_join_guard(const PASequence& seq, int m, Coord k2) {
    const auto& lv = seq.levels[m];
    for (std::size_t i = 0; i < lv.classes.size(); ++i) {
        const Region& r = lv.classes[i].region;
        for (std::size_t j : lv.meeting(r.hull().grown(k2)))
            if (j > i && !(set_distance(r, lv.classes[j].region) > k2))
                throw ConstructionError("level-" + std::to_string(m) + " classes " + std::to_string(i) + " and " +
                                        std::to_string(j) + " are within 2K; the fattened join is ill-defined");
    }
}

}  // namespace

ToastHierarchy build_toast(const ToastParams& p, std::vector<PointSet> cross_sections) {
    p.validate();
    if (cross_sections.size() != static_cast<std::size_t>(p.levels) + 1)
        throw DomainError("levels: expected " + std::to_string(p.levels + 1) + " cross-sections");
    ToastHierarchy h;
    h.params = p;
    h.window = p.effective_window();
    h.cross_sections = std::move(cross_sections);
    PASequence& seq = h.sequence;
    seq.dim = p.dim;
    seq.levels.resize(static_cast<std::size_t>(p.levels) + 1);
    std::vector<LevelWork> work(seq.levels.size());

    for (int n = 0; n <= p.levels; ++n) {
        const Coord an = p.radius(n);
        const Coord seed_r = an.divided(10);
        auto& classes = seq.levels[n].classes;
        for (const QVec& c : h.cross_sections[n].points) {
            if (!h.window.contains(Box::ball(c, an))) continue;
            const std::size_t self = classes.size();
            Box seed = Box::ball(c, seed_r);
            std::vector<Box> grown{seed};
            Box hull = seed;
            std::vector<ClassRef> absorbed;
            bool changed = true;
            while (changed) {
                changed = false;
                for (int m = n - 1; m >= 0; --m) {
                    LevelWork& lw = work[m];
                    for (std::uint32_t j : lw.index.query(hull)) {
                        if (lw.owner[j] == static_cast<std::int64_t>(self)) continue;
                        const Region& f = lw.fat[j];
                        bool hit = false;
                        for (const Box& b : f.boxes()) {
                            for (const Box& g : grown)
                                if (g.intersects(b)) {
                                    hit = true;
                                    break;
                                }
                            if (hit) break;
                        }
                        if (!hit) continue;
                        if (lw.owner[j] >= 0)
                            throw ConstructionError("level-" + std::to_string(n) + " classes " +
                                                    std::to_string(lw.owner[j]) + " and " + std::to_string(self) +
                                                    " both absorb level-" + std::to_string(m) + " class " +
                                                    std::to_string(j) + " (gamma too small?)");
                        lw.owner[j] = static_cast<std::int64_t>(self);
                        absorbed.push_back(ClassRef{m, j});
                        changed = true;
                        // A class that already has a parent lies inside a fattened
                        // ancestor that was absorbed first, so its boxes add nothing.
                        if (lw.parent_level[j] >= 0) continue;
                        for (const Box& b : f.boxes()) {
                            if (seed.contains(b)) continue;
                            grown.push_back(b);
                            hull = hull.hull_with(b);
                        }
                    }
                }
            }
            PAClass pc;
            pc.id = self;
            pc.level = n;
            pc.anchor = c;
            pc.region = Region(p.dim, std::move(grown));
            for (const ClassRef& r : absorbed) {
                LevelWork& lw = work[r.level];
                if (lw.parent_level[r.index] < 0) {
                    pc.children.push_back(r);
                    lw.parent_level[r.index] = n;
                    lw.parent[r.index] = self;
                }
            }
            std::sort(pc.children.begin(), pc.children.end(), [](const ClassRef& a, const ClassRef& b) {
                return a.level != b.level ? a.level > b.level : a.index < b.index;
            });
            classes.push_back(std::move(pc));
        }
        // Ownership only guards against two classes of one level sharing a
        // lower class; reset it for the next level.
        for (int m = 0; m < n; ++m) std::fill(work[m].owner.begin(), work[m].owner.end(), -1);

        LevelWork& lw = work[n];
        lw.fat.reserve(classes.size());
        double cell = std::max(an.to_double(), 1.0);
        lw.index = BoxIndex(p.dim, cell);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            lw.fat.push_back(fatten(classes[i].region, p.K));
            lw.index.insert(static_cast<std::uint32_t>(i), lw.fat.back().hull());
        }
        lw.parent_level.assign(classes.size(), -1);
        lw.parent.assign(classes.size(), 0);
        lw.owner.assign(classes.size(), -1);
        seq.levels[n].build_index(p.dim);
        // Lower levels never change afterwards, so checking each level once
        // here guards every later join.
        check_join_guard(seq, n, p.K * 2);
    }
    seq.finalize();
    return h;
}

ToastHierarchy build_toast(const ToastParams& p) { return build_toast(p, generate_cross_sections(p)); }

// ---------------------------------------------------------------- verification

namespace {

// Exact distance from region d to the complement of region c (d inside c).
Coord clearance(const Region& d, const Region& c, const std::vector<Box>& holes, const Box& hull) {
    Coord best = diameter(c);
    Box dh = d.hull();
    for (int k = 0; k < c.dim(); ++k) {
        best = min(best, dh.lo[k] - hull.lo[k]);
        best = min(best, hull.hi[k] - dh.hi[k]);
    }
    for (const Box& q : holes) {
        if (distance(dh, q) >= best) continue;
        for (const Box& b : d.boxes()) best = min(best, distance(b, q));
    }
    return best;
}

}  // namespace

Report verify_toast_invariants(const ToastHierarchy& h) {
    const ToastParams& p = h.params;
    const PASequence& seq = h.sequence;
    Report rep;
    rep.command = "toast";

    CheckResult ball("anchor_ball");
    CheckResult clear("child_clearance");
    CheckResult diam("diameter");
    CheckResult sep("separation");
    CheckResult fin("finite_subclasses");
    CheckResult lac("cross_section_lacunary");

    for (int n = 0; n <= seq.top(); ++n) {
        const Coord an = p.radius(n);
        const auto& lv = seq.levels[n];
        ++lac.samples;
        if (!check_lacunary(h.cross_sections[n], an)) lac.fail("C_" + std::to_string(n) + " is not a_n-lacunary");
        for (std::size_t i = 0; i < lv.classes.size(); ++i) {
            const PAClass& c = lv.classes[i];
            const std::string tag = "level " + std::to_string(n) + " class " + std::to_string(i);
            ++ball.samples;
            if (!c.region.contains(Box::ball(c.anchor, p.K))) ball.fail(tag + ": B_K(anchor) not inside");
            ++diam.samples;
            Coord dm = diameter(c.region);
            diam.metrics["max_diameter_over_radius"] = std::max(diam.metrics["max_diameter_over_radius"], dm.to_double() / an.to_double());
            if (dm * 3 > an) diam.fail(tag + ": diameter " + dm.str() + " > a_n/3");
            Box reach = c.region.hull().grown(Coord::from_raw(an.raw() / 3 + 1));
            ++sep.samples;
            for (std::size_t j : lv.meeting(reach)) {
                if (j <= i) continue;
                ++sep.counts["near_pairs"];
                Coord sd = set_distance(c.region, lv.classes[j].region);
                if (sd * 3 < an) sep.fail(tag + " and class " + std::to_string(j) + ": distance " + sd.str() + " < a_n/3");
            }
            if (n > 0) {
                std::int64_t sub = 0;
                auto groups = seq.contained(ClassRef{n, i});
                std::vector<Box> holes = c.region.complement_in_hull();
                Box hull = c.region.hull();
                for (int m = 0; m < n; ++m)
                    for (std::size_t j : groups[m]) {
                        ++sub;
                        ++clear.samples;
                        Coord cl = clearance(seq.levels[m].classes[j].region, c.region, holes, hull);
                        if (cl < p.K)
                            clear.fail(tag + ": level-" + std::to_string(m) + " class " + std::to_string(j) +
                                       " within " + cl.str() + " of the boundary");
                    }
                ++fin.samples;
                fin.counts["max_contained"] = std::max(fin.counts["max_contained"], sub);
                fin.counts["max_children"] =
                    std::max(fin.counts["max_children"], static_cast<std::int64_t>(c.children.size()));
            }
        }
    }
    for (int n = 0; n <= seq.top(); ++n)
        ball.counts["classes_level_" + std::to_string(n)] = static_cast<std::int64_t>(seq.levels[n].classes.size());
    rep.add(ball);
    if (seq.top() > 0) rep.add(clear);
    rep.add(diam);
    rep.add(sep);
    if (seq.top() > 0) rep.add(fin);
    rep.add(lac);
    return rep;
}

CoverageReport toast_coverage(const ToastHierarchy& h, std::size_t samples, std::uint64_t seed,
                              std::optional<Coord> margin, double required) {
    CoverageReport out;
    Coord mg = margin ? *margin : h.params.radius(h.params.levels);
    out.interior = h.window.grown(-mg);
    std::mt19937_64 rng(seed);
    std::size_t hit = 0;
    const int d = h.params.dim;
    for (std::size_t s = 0; s < samples; ++s) {
        Vec x(d);
        for (int k = 0; k < d; ++k) {
            std::uniform_real_distribution<double> u(out.interior.lo[k].to_double(), out.interior.hi[k].to_double());
            x[k] = u(rng);
        }
        for (const auto& lv : h.sequence.levels)
            if (lv.locate(x)) {
                ++hit;
                break;
            }
    }
    out.fraction = samples ? static_cast<double>(hit) / static_cast<double>(samples) : 1.0;
    out.check.samples = samples;
    out.check.metrics["fraction"] = out.fraction;
    if (out.fraction < required)
        out.check.fail("coverage " + std::to_string(out.fraction) + " below " + std::to_string(required));
    return out;
}

}  // namespace specflow
