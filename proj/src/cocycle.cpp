#include "specflow/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace specflow {

std::string to_string(const OrbitPoint& z) { return "(" + std::to_string(z.seed) + ", " + to_string(z.index) + ")"; }

ZdSystem::ZdSystem(int dim, std::size_t seeds, std::int64_t radius, std::function<bool(const OrbitPoint&)> in_domain)
    : dim_(dim), seeds_(seeds), radius_(radius), in_domain_(std::move(in_domain)) {
    if (dim < 1 || dim > kMaxDim) throw DomainError("d: must be between 1 and 3");
    if (seeds == 0) throw DomainError("seeds: need at least one orbit");
    if (radius < 0) throw DomainError("radius: must be >= 0");
}

bool ZdSystem::contains(const OrbitPoint& z) const {
    if (z.seed >= seeds_ || z.index.dim() != dim_ || norm(z.index) > radius_) return false;
    return !in_domain_ || in_domain_(z);
}

OrbitPoint ZdSystem::act_checked(const IVec& n, const OrbitPoint& z) const {
    OrbitPoint w = act(n, z);
    if (!contains(w)) throw DomainError("T_" + to_string(n) + " leaves the orbit window at " + to_string(z));
    return w;
}

Cocycle linear_cocycle(int dim, double sign, std::int64_t radius) {
    Cocycle c;
    c.dim = dim;
    c.eval = [sign](const IVec& n, const OrbitPoint&) -> std::optional<Vec> { return sign * to_vec(n); };
    c.domain_radius = radius;
    c.claimed_k1 = c.claimed_k2 = std::abs(sign);
    c.label = sign < 0 ? "-n" : "n";
    return c;
}

Cocycle negated(const Cocycle& rho) {
    Cocycle c = rho;
    auto inner = rho.eval;
    c.eval = [inner](const IVec& n, const OrbitPoint& z) -> std::optional<Vec> {
        auto v = inner(n, z);
        if (!v) return std::nullopt;
        return -*v;
    };
    c.label = "-(" + rho.label + ")";
    return c;
}

std::optional<OrbitPoint> sample_orbit_point(const ZdSystem& t, std::mt19937_64& rng, std::int64_t radius,
                                             int attempts) {
    std::uniform_int_distribution<std::uint32_t> seed(0, static_cast<std::uint32_t>(t.seeds() - 1));
    std::uniform_int_distribution<std::int64_t> coord(-radius, radius);
    for (int a = 0; a < attempts; ++a) {
        OrbitPoint z{seed(rng), IVec(t.dim())};
        for (auto& c : z.index) c = coord(rng);
        if (t.contains(z)) return z;
    }
    return std::nullopt;
}

namespace {

IVec random_step(int d, std::int64_t r, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> u(-r, r);
    IVec n(d);
    for (auto& c : n) c = u(rng);
    return n;
}

}  // namespace

CheckResult check_cocycle_identity(const Cocycle& rho, const ZdSystem& t, std::size_t samples, std::uint64_t seed,
                                   double tol) {
    CheckResult r("cocycle_identity");
    std::mt19937_64 rng(seed);
    const std::int64_t zr = std::max<std::int64_t>(1, t.radius() / 2);
    const std::int64_t step = std::max<std::int64_t>(1, t.radius() / 4);
    std::size_t undefined = 0;
    while (r.samples < samples && undefined < 50 * samples + 100) {
        auto z = sample_orbit_point(t, rng, zr);
        if (!z) {
            ++undefined;
            continue;
        }
        IVec m = random_step(t.dim(), step, rng), n = random_step(t.dim(), step, rng);
        OrbitPoint nz = t.act(n, *z);
        if (!t.contains(nz) || !t.contains(t.act(m, nz))) {
            ++undefined;
            continue;
        }
        auto a = rho(m + n, *z), b = rho(m, nz), c = rho(n, *z);
        if (!a || !b || !c) {
            ++undefined;
            continue;
        }
        double err = norm(*a - *b - *c);
        ++r.samples;
        r.max_error = std::max(r.max_error, err);
        if (!(err <= tol))
            r.fail("residual " + std::to_string(err) + " at z=" + to_string(*z) + " m=" + to_string(m) + " n=" +
                   to_string(n));
    }
    r.counts["undefined"] = static_cast<std::int64_t>(undefined);
    if (r.samples == 0) r.fail("no sample had the cocycle defined");
    return r;
}

CheckResult check_admissible(const Cocycle& rho, const ZdSystem& t, std::int64_t radius, const AdmissibleOptions& opt) {
    CheckResult r("admissible");
    if (radius > rho.domain_radius) throw DomainError("radius: exceeds the cocycle's declared domain radius");
    auto threshold = opt.threshold ? opt.threshold : [k1 = rho.claimed_k1](std::int64_t k) {
        return k1 * static_cast<double>(k) * (1 - 1e-9);
    };
    std::mt19937_64 rng(opt.seed);
    const int d = t.dim();
    double growth = std::numeric_limits<double>::infinity();
    std::int64_t injectivity = 0, escape = 0;
    for (std::size_t b = 0; b < opt.base_points; ++b) {
        auto z = sample_orbit_point(t, rng, std::max<std::int64_t>(0, t.radius() / 2));
        if (!z) continue;
        std::map<std::int64_t, double> shell_min;
        IVec n(d, -radius);
        while (true) {
            OrbitPoint w = t.act(n, *z);
            if (t.contains(w)) {
                if (auto v = rho(n, *z)) {
                    ++r.samples;
                    std::int64_t k = norm(n);
                    double len = norm(*v);
                    if (k != 0 && len == 0.0) {
                        ++injectivity;
                        r.fail("rho(" + to_string(n) + ", " + to_string(*z) + ") = 0");
                    }
                    auto it = shell_min.find(k);
                    if (it == shell_min.end())
                        shell_min.emplace(k, len);
                    else
                        it->second = std::min(it->second, len);
                }
            }
            int k = 0;
            while (k < d && n[k] == radius) n[k++] = -radius;
            if (k == d) break;
            ++n[k];
        }
        for (auto [k, m] : shell_min) {
            if (k == 0) continue;
            growth = std::min(growth, m / static_cast<double>(k));
            if (m < threshold(k)) {
                ++escape;
                r.fail("min ||rho|| on shell " + std::to_string(k) + " is " + std::to_string(m) + " at " +
                       to_string(*z));
            }
        }
    }
    r.counts["injectivity_failures"] = injectivity;
    r.counts["escape_failures"] = escape;
    r.metrics["min_growth_rate"] = std::isinf(growth) ? 0.0 : growth;
    if (r.samples == 0) r.fail("no defined values in the tested ball");
    r.note = "bounded certification up to radius " + std::to_string(radius);
    return r;
}

CocycleConstants estimate_cocycle_constants(const Cocycle& rho, const ZdSystem& t, std::size_t samples,
                                            std::int64_t max_step, std::uint64_t seed, double lo, double hi) {
    CocycleConstants out;
    CheckResult& r = out.check;
    std::mt19937_64 rng(seed);
    double k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
    std::size_t misses = 0;
    while (r.samples < samples && misses < 50 * samples + 100) {
        auto z = sample_orbit_point(t, rng, t.radius());
        if (!z) {
            ++misses;
            continue;
        }
        IVec m = random_step(t.dim(), max_step, rng), n = random_step(t.dim(), max_step, rng);
        if (m == n) continue;
        auto a = rho(m, *z), b = rho(n, *z);
        if (!a || !b) {
            ++misses;
            continue;
        }
        double q = norm(*a - *b) / static_cast<double>(norm(m - n));
        ++r.samples;
        k1 = std::min(k1, q);
        k2 = std::max(k2, q);
    }
    out.k1 = std::isinf(k1) ? 0.0 : k1;
    out.k2 = k2;
    r.metrics["k1"] = out.k1;
    r.metrics["k2"] = out.k2;
    r.counts["undefined"] = static_cast<std::int64_t>(misses);
    if (r.samples == 0) r.fail("no defined pairs");
    if (out.k1 < lo - 1e-12 || out.k2 > hi + 1e-12)
        r.fail("constants [" + std::to_string(out.k1) + ", " + std::to_string(out.k2) + "] outside [" +
               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return out;
}

}  // namespace specflow
