#include "specflow/specialflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace specflow {

PrincipalExtension::PrincipalExtension(ZdSystem t, Cocycle rho) : t_(std::move(t)), rho_(std::move(rho)) {
    if (rho_.dim != t_.dim()) throw DomainError("principal extension: cocycle and action dimensions differ");
    if (!rho_.eval) throw DomainError("principal extension: cocycle has no evaluator");
    if (!(rho_.claimed_k1 > 0.0)) throw DomainError("principal extension: needs a positive lower constant K1");
}

PrincipalExtension::Point PrincipalExtension::lift(const OrbitPoint& z, const Vec& r) const {
    return Point{z, IVec(t_.dim()), r};
}

std::optional<PrincipalExtension::Point> PrincipalExtension::act(const IVec& n, const Point& p) const {
    Point q{p.base, p.steps + n, p.r0};
    if (!resolve(q)) return std::nullopt;
    return q;
}

std::optional<std::pair<OrbitPoint, Vec>> PrincipalExtension::resolve(const Point& p) const {
    OrbitPoint z = t_.act(p.steps, p.base);
    if (!t_.contains(z)) return std::nullopt;
    auto v = rho_(p.steps, p.base);
    if (!v) return std::nullopt;
    return std::make_pair(z, p.r0 + *v);
}

std::optional<std::pair<OrbitPoint, Vec>> PrincipalExtension::apply(const IVec& n, const OrbitPoint& z,
                                                                      const Vec& r) const {
    return resolve(Point{z, n, r});
}

namespace {

double euclid(const Vec& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

// Smaller sup norm wins, then the lexicographically smaller r, then z.
bool better(const Vec& a, const OrbitPoint& za, const Vec& b, const OrbitPoint& zb) {
    double na = norm(a), nb = norm(b);
    if (na != nb) return na < nb;
    if (!(a == b)) return a < b;
    return za < zb;
}

}  // namespace

QuotientPoint PrincipalExtension::canonicalize(const OrbitPoint& z, const Vec& r,
                                               std::optional<std::int64_t> search_radius) const {
    const int d = t_.dim();
    if (!t_.contains(z)) throw DomainError("canonicalize: " + to_string(z) + " is outside the orbit window");
    auto value = [&](const IVec& n) -> std::optional<Vec> {
        if (!t_.contains(t_.act(n, z))) return std::nullopt;
        auto v = rho_(n, z);
        if (!v) return std::nullopt;
        return r + *v;
    };

    IVec cur(d);
    Vec cur_r = r;
    if (!search_radius) {
        // Descent on the Euclidean length over the 3^d - 1 neighbouring steps.
        for (int it = 0; it < 100000; ++it) {
            IVec best = cur;
            double best_len = euclid(cur_r);
            Vec best_r = cur_r;
            IVec k(d, -1);
            while (true) {
                if (norm(k) != 0) {
                    IVec n = cur + k;
                    if (auto v = value(n)) {
                        double len = euclid(*v);
                        if (len < best_len) {
                            best_len = len;
                            best = n;
                            best_r = *v;
                        }
                    }
                }
                int a = 0;
                while (a < d && k[a] == 1) k[a++] = -1;
                if (a == d) break;
                ++k[a];
            }
            if (best == cur) break;
            cur = best;
            cur_r = best_r;
        }
    }
    const std::int64_t radius =
        search_radius ? *search_radius
                      : static_cast<std::int64_t>(std::ceil(2.0 * norm(cur_r) / rho_.claimed_k1)) + 1;

    QuotientPoint out;
    out.z = t_.act(cur, z);
    out.r = cur_r;
    IVec k(d, -radius);
    while (true) {
        IVec n = cur + k;
        if (auto v = value(n)) {
            OrbitPoint w = t_.act(n, z);
            if (better(*v, w, out.r, out.z)) {
                out.r = *v;
                out.z = w;
            }
        } else {
            out.verified = false;
        }
        int a = 0;
        while (a < d && k[a] == radius) k[a++] = -radius;
        if (a == d) break;
        ++k[a];
    }
    return out;
}

QuotientPoint PrincipalExtension::flow_act(const QuotientPoint& p, const Vec& s) const {
    return canonicalize(p.z, p.r + s);
}

bool same_point(const QuotientPoint& a, const QuotientPoint& b, double tol) {
    return a.z == b.z && norm(a.r - b.r) <= tol;
}

// ---------------------------------------------------------------- transversal

TransversalResult transversal(const PrincipalExtension& ext, const std::vector<std::pair<OrbitPoint, Vec>>& pts) {
    TransversalResult out;
    CheckResult& c = out.check;
    const ZdSystem& t = ext.system();
    const int d = t.dim();
    const double k1 = ext.cocycle().claimed_k1;
    std::vector<QuotientPoint> canon;  // canonical form per orbit

    auto members = [&](const QuotientPoint& q, std::int64_t level, std::int64_t radius, bool& complete) {
        std::vector<QuotientPoint> inside;
        IVec k(d, -radius);
        while (true) {
            auto p = ext.apply(k, q.z, q.r);
            if (p) {
                if (norm(p->second) <= static_cast<double>(level)) inside.push_back(QuotientPoint{p->first, p->second});
            } else {
                complete = false;
            }
            int a = 0;
            while (a < d && k[a] == radius) k[a++] = -radius;
            if (a == d) break;
            ++k[a];
        }
        return inside;
    };

    for (const auto& [z, r] : pts) {
        QuotientPoint q = ext.canonicalize(z, r);
        ++c.samples;
        if (!q.verified) c.fail("canonical form of " + to_string(z) + " not certified");
        std::size_t idx = canon.size();
        for (std::size_t i = 0; i < canon.size(); ++i)
            if (same_point(canon[i], q, 1e-9)) {
                idx = i;
                break;
            }
        out.orbit_of.push_back(idx);
        if (idx < canon.size()) continue;
        canon.push_back(q);

        // Smallest k with the orbit meeting Y_k, then orbit cap Y = orbit cap Y_k.
        const std::int64_t level = static_cast<std::int64_t>(std::ceil(norm(q.r)));
        const std::int64_t radius =
            static_cast<std::int64_t>(std::ceil((static_cast<double>(level) + norm(q.r)) / k1)) + 1;
        bool complete = true;
        auto in_y = members(q, level, radius, complete);
        bool complete_wider = true;
        auto wider = members(q, level, radius + 2, complete_wider);
        if (!complete) c.fail("search ball around " + to_string(q.z) + " leaves the window");
        if (in_y.empty()) c.fail("orbit of " + to_string(z) + " misses Y");
        if (complete_wider && wider.size() != in_y.size())
            c.fail("orbit cap Y grows with the search radius at " + to_string(q.z));
        QuotientPoint pick = in_y.empty() ? q : in_y.front();
        for (const auto& p : in_y)
            if (p.r < pick.r || (p.r == pick.r && p.z < pick.z)) pick = p;
        if (!same_point(ext.canonicalize(pick.z, pick.r), q, 1e-9))
            c.fail("chosen point of orbit " + std::to_string(idx) + " is not in that orbit");
        out.chosen.push_back(pick);
        out.meets.push_back(in_y.size());
        out.level.push_back(level);
    }
    c.counts["orbits"] = static_cast<std::int64_t>(out.chosen.size());
    return out;
}

// ---------------------------------------------------------------- duality

CheckResult duality_check(const PrincipalExtension& ext, std::size_t samples, std::int64_t max_step,
                          std::uint64_t seed, double tol) {
    CheckResult c("duality");
    const ZdSystem& t = ext.system();
    const int d = t.dim();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> step(-max_step, max_step);
    std::size_t misses = 0;
    while (c.samples < samples && misses < 50 * samples + 100) {
        auto z = sample_orbit_point(t, rng, t.radius());
        if (!z) {
            ++misses;
            continue;
        }
        IVec n(d);
        if (c.samples > 0)
            for (auto& k : n) k = step(rng);
        OrbitPoint nz = t.act(n, *z);
        auto rho = ext.cocycle()(n, *z);
        if (!t.contains(nz) || !rho) {
            ++misses;
            continue;
        }
        QuotientPoint y = ext.canonicalize(*z, Vec(d));
        QuotientPoint y2 = ext.canonicalize(nz, Vec(d));
        if (!y.verified || !y2.verified || y.z.seed != y2.z.seed) {
            ++misses;
            continue;
        }
        IVec k = y2.z.index - y.z.index;
        auto rk = ext.cocycle()(k, y.z);
        if (!rk) {
            ++misses;
            continue;
        }
        // y + s = y2 exactly when (y.z, y.r + s) and y2 share a That-orbit.
        Vec s = y2.r - y.r - *rk;
        double err = norm(s + *rho);
        QuotientPoint moved = ext.flow_act(y, s);
        ++c.samples;
        c.max_error = std::max(c.max_error, err);
        if (!(err <= tol)) c.fail("rho' + rho = " + std::to_string(err) + " at " + to_string(*z) + " n=" + to_string(n));
        if (!same_point(moved, y2, tol)) c.fail("flowing y by rho' does not reach T'_n y at " + to_string(*z));
    }
    c.counts["undefined"] = static_cast<std::int64_t>(misses);
    if (c.samples < samples) c.fail("only " + std::to_string(c.samples) + " defined samples");
    return c;
}

// ---------------------------------------------------------------- suspension

Cocycle suspension_cocycle(const SuspensionSystem1D<double>& sys) {
    Cocycle c;
    c.dim = 1;
    c.eval = [sys](const IVec& n, const OrbitPoint& z) -> std::optional<Vec> {
        const std::int64_t k = n[0];
        double sum = 0.0;
        try {
            if (k > 0)
                for (std::int64_t i = 0; i < k; ++i) sum -= detail::ceiling_at(sys, detail::shifted(z, i));
            else
                for (std::int64_t i = 1; i <= -k; ++i) sum += detail::ceiling_at(sys, detail::shifted(z, -i));
        } catch (const DomainError&) {
            return std::nullopt;
        }
        return Vec{sum};
    };
    c.domain_radius = sys.radius;
    c.claimed_k1 = sys.floor;
    c.claimed_k2 = std::numeric_limits<double>::infinity();
    c.label = "suspension";
    return c;
}

CheckResult cross_check_suspension(const SuspensionSystem1D<double>& sys, std::size_t samples, double max_r,
                                   std::uint64_t seed, double tol) {
    CheckResult c("suspension_vs_special_flow");
    ZdSystem t(1, 1, sys.radius);
    PrincipalExtension ext(t, suspension_cocycle(sys));
    std::mt19937_64 rng(seed);
    const std::int64_t zr = std::max<std::int64_t>(0, sys.radius / 4);
    std::uniform_int_distribution<std::int64_t> zi(-zr, zr);
    std::uniform_real_distribution<double> u(0.0, 1.0), ur(-max_r, max_r);
    for (std::size_t i = 0; i < samples; ++i) {
        OrbitPoint z{0, IVec{zi(rng)}};
        double t0 = u(rng) * sys.f(z);
        double r = ur(rng);
        SuspPoint<double> q = suspend1d(sys, SuspPoint<double>{z, t0}, r);
        QuotientPoint a = ext.canonicalize(q.z, Vec{q.t});
        QuotientPoint b = ext.flow_act(ext.canonicalize(z, Vec{t0}), Vec{r});
        ++c.samples;
        double err = a.z == b.z ? norm(a.r - b.r) : std::numeric_limits<double>::infinity();
        c.max_error = std::max(c.max_error, err);
        if (!(err <= tol)) c.fail("suspension and special flow disagree at " + to_string(z) + " r=" + std::to_string(r));
    }
    return c;
}

}  // namespace specflow
