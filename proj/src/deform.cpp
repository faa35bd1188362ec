#include "specflow/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specflow {

Vec PointMap::inverse(const Vec&, double) const { throw DomainError("this map has no inverse"); }

// ---------------------------------------------------------------- shift maps

void ShiftSpec::validate() const {
    if (A.empty()) throw DomainError("shift map: A must be nonempty");
    if (v.dim() != A.dim()) throw DomainError("shift map: v has the wrong dimension");
    if (!(norm(v) < K)) throw DomainError("shift map: K must exceed ||v||");
    if (L && !(*L > Coord{})) throw DomainError("shift map: L must be > 0");
}

ShiftMap::ShiftMap(ShiftSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    field_ = BoundaryDistanceField(spec_.A);
    v_ = to_vec(spec_.v);
    k_ = spec_.K.to_double();
    cap_ = spec_.L ? spec_.L->to_double() : std::numeric_limits<double>::infinity();
}

Vec ShiftMap::apply(const Vec& x) const {
    if (!field_.contains(x)) throw DomainError("shift map: point " + to_string(x) + " is not in A");
    return apply_unchecked(x);
}

Vec ShiftMap::inverse(const Vec& y, double tol) const {
    if (!field_.contains(y)) throw DomainError("shift map inverse: point " + to_string(y) + " is not in A");
    double t_hi = std::min(cap_, 0.5 * diameter(spec_.A).to_double()) / k_;
    double t = solve_displacement(y, v_, t_hi, tol, [this](const Vec& x) { return factor(x); });
    return y - t * v_;
}

std::vector<Region> ShiftMap::seams() const {
    std::vector<Region> out{spec_.A};
    if (spec_.L) {
        Region inner = shrink(spec_.A, *spec_.L);
        if (!inner.empty()) out.push_back(std::move(inner));
    }
    return out;
}

Vec eval_f(const ShiftSpec& spec, const Vec& x) {
    ShiftSpec s = spec;
    s.L.reset();
    return ShiftMap(std::move(s)).apply(x);
}

Vec eval_h(const ShiftSpec& spec, const Vec& x) {
    if (!spec.L) throw DomainError("eval_h needs a truncation length L");
    return ShiftMap(spec).apply(x);
}

Vec invert(const PointMap& map, const Vec& y, double tol) { return map.inverse(y, tol); }

// ---------------------------------------------------------------- gluing

namespace {

double median_extent(const std::vector<Piece>& pieces, int dim) {
    std::vector<double> e;
    for (const auto& p : pieces) {
        if (p.region.empty()) continue;
        Box h = p.region.hull();
        double m = 0.0;
        for (int k = 0; k < dim; ++k) m = std::max(m, h.extent(k).to_double());
        e.push_back(m);
    }
    if (e.empty()) return 1.0;
    std::nth_element(e.begin(), e.begin() + static_cast<long>(e.size() / 2), e.end());
    return std::max(e[e.size() / 2], 1e-3);
}

}  // namespace

PiecewiseDeformation::PiecewiseDeformation(int dim, std::vector<Piece> pieces, Region ambient)
    : dim_(dim), pieces_(std::move(pieces)), ambient_(std::move(ambient)), index_(dim, median_extent(pieces_, dim)) {
    for (std::size_t i = 0; i < pieces_.size(); ++i)
        for (const Box& b : pieces_[i].region.boxes()) index_.insert(static_cast<std::uint32_t>(i), b);
}

std::optional<std::size_t> PiecewiseDeformation::piece_of(const Vec& x) const {
    if (const auto* c = index_.candidates(x))
        for (auto i : *c)
            if (pieces_[i].region.contains(x)) return i;
    return std::nullopt;
}

Vec PiecewiseDeformation::apply(const Vec& x) const {
    if (auto i = piece_of(x)) return pieces_[*i].map->apply(x);
    return x;
}

Vec PiecewiseDeformation::inverse(const Vec& y, double tol) const {
    if (auto i = piece_of(y)) return pieces_[*i].map->inverse(y, tol);
    return y;
}

std::vector<Region> PiecewiseDeformation::seams() const {
    std::vector<Region> out{ambient_};
    for (const auto& p : pieces_) {
        out.push_back(p.region);
        for (auto& s : p.map->seams()) out.push_back(std::move(s));
    }
    return out;
}

std::optional<QVec> sample_boundary_point(const Region& r, const BoundaryDistanceField& field, std::mt19937_64& rng) {
    if (r.empty()) return std::nullopt;
    const int d = r.dim();
    std::uniform_int_distribution<std::size_t> pick(0, r.boxes().size() - 1);
    std::uniform_int_distribution<int> axis(0, d - 1);
    std::bernoulli_distribution side(0.5);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const Box& b = r.boxes()[pick(rng)];
        QVec x(d);
        for (int k = 0; k < d; ++k) {
            std::uniform_int_distribution<std::int64_t> u(b.lo[k].raw(), b.hi[k].raw());
            x[k] = Coord::from_raw(u(rng));
        }
        int k = axis(rng);
        x[k] = side(rng) ? b.hi[k] : b.lo[k];
        if (field(to_vec(x)) == 0.0) return x;
    }
    return std::nullopt;
}

PiecewiseDeformation glue(std::vector<Piece> pieces, Region ambient, std::size_t boundary_samples,
                          std::uint64_t seed) {
    const int d = ambient.dim();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!pieces[i].map) throw DomainError("glue: piece " + std::to_string(i) + " has no map");
        if (!ambient.contains(pieces[i].region))
            throw DomainError("glue: piece " + std::to_string(i) + " is not inside the ambient region");
    }
    PiecewiseDeformation g(d, std::move(pieces), std::move(ambient));
    const auto& ps = g.pieces();
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j)
            if (ps[i].region.hull().intersects(ps[j].region.hull()) && ps[i].region.intersects(ps[j].region))
                throw DomainError("glue: pieces " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        BoundaryDistanceField field(ps[i].region);
        for (std::size_t s = 0; s < boundary_samples; ++s) {
            auto p = sample_boundary_point(ps[i].region, field, rng);
            if (!p) continue;
            Vec x = to_vec(*p);
            double err = norm(ps[i].map->apply(x) - x);
            if (err > 1e-12)
                throw DomainError("glue: piece " + std::to_string(i) + " moves boundary point " + to_string(x) +
                                  " by " + std::to_string(err));
        }
    }
    return g;
}

// ---------------------------------------------------------------- linked sets

std::optional<QVec> between_point(const Region& ab, const QVec& x, const QVec& y) {
    const Coord D = norm(x - y);
    const int d = x.dim();
    for (const Box& r : ab.boxes()) {
        Coord lo_a;
        Coord hi_a = D;
        for (int k = 0; k < d; ++k) {
            lo_a = max(lo_a, x[k] - r.hi[k]);
            lo_a = max(lo_a, r.lo[k] - x[k]);
            hi_a = min(hi_a, r.hi[k] - y[k] + D);
            hi_a = min(hi_a, y[k] + D - r.lo[k]);
        }
        if (hi_a < lo_a) continue;
        QVec z(d);
        for (int k = 0; k < d; ++k) z[k] = max(max(x[k] - lo_a, y[k] - (D - lo_a)), r.lo[k]);
        if (r.contains(z) && norm(x - z) + norm(z - y) == D) return z;
    }
    return std::nullopt;
}

LinkedReport check_linked(const Region& a, const Region& b, std::size_t samples, std::uint64_t seed) {
    LinkedReport out;
    if (a.empty() || b.empty()) {
        out.check.fail("empty input region");
        return out;
    }
    Region ab = intersect(a, b);
    std::mt19937_64 rng(seed);
    auto exact_point = [&rng](const Region& r) {
        std::vector<double> vol;
        for (const Box& bx : r.boxes()) {
            double v = 1.0;
            for (int k = 0; k < bx.dim(); ++k) v *= bx.extent(k).to_double();
            vol.push_back(v);
        }
        std::discrete_distribution<std::size_t> pick(vol.begin(), vol.end());
        const Box& bx = r.boxes()[pick(rng)];
        QVec x(bx.dim());
        for (int k = 0; k < bx.dim(); ++k) {
            std::uniform_int_distribution<std::int64_t> u(bx.lo[k].raw(), bx.hi[k].raw());
            x[k] = Coord::from_raw(u(rng));
        }
        return x;
    };
    for (std::size_t s = 0; s < samples; ++s) {
        QVec x = exact_point(a);
        QVec y = exact_point(b);
        ++out.check.samples;
        if (between_point(ab, x, y))
            ++out.passed;
        else {
            ++out.failed;
            out.check.fail("no point of A cap B between " + to_string(x) + " and " + to_string(y));
        }
    }
    out.check.counts["passed"] = static_cast<std::int64_t>(out.passed);
    out.check.counts["failed"] = static_cast<std::int64_t>(out.failed);
    return out;
}

// ---------------------------------------------------------------- Lipschitz estimation

Vec sample_region(const Region& r, std::mt19937_64& rng) {
    if (r.empty()) throw DomainError("cannot sample an empty region");
    std::vector<double> vol;
    vol.reserve(r.size());
    for (const Box& b : r.boxes()) {
        double v = 1.0;
        for (int k = 0; k < b.dim(); ++k) v *= b.extent(k).to_double();
        vol.push_back(v);
    }
    std::discrete_distribution<std::size_t> pick(vol.begin(), vol.end());
    const Box& b = r.boxes()[pick(rng)];
    Vec x(r.dim());
    for (int k = 0; k < r.dim(); ++k) {
        std::uniform_real_distribution<double> u(b.lo[k].to_double(), b.hi[k].to_double());
        x[k] = u(rng);
    }
    return x;
}

LipschitzEstimate estimate_bi_lipschitz(const PointMap& map, const Region& domain, std::size_t pairs,
                                        std::uint64_t seed, std::vector<QuotientSample>* sink) {
    if (pairs == 0) throw DomainError("estimate_bi_lipschitz: pairs must be >= 1");
    if (domain.empty() || diameter(domain) == Coord{})
        throw DomainError("estimate_bi_lipschitz: degenerate domain");
    const int d = domain.dim();
    const double scale = std::min(1.0, diameter(domain).to_double());
    std::mt19937_64 rng(seed);
    std::vector<Region> seams = map.seams();
    seams.push_back(domain);
    std::vector<BoundaryDistanceField> fields;
    fields.reserve(seams.size());
    for (const Region& s : seams) fields.emplace_back(s);
    BoundaryDistanceField dom(domain);

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> logd(std::log(1e-3), std::log(0.5));
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    std::uniform_int_distribution<std::size_t> pick_seam(0, seams.size() - 1);
    auto direction = [&] {
        Vec u(d);
        for (int k = 0; k < d; ++k) u[k] = unit(rng);
        double n = norm(u);
        if (n == 0.0) u[0] = n = 1.0;
        return (1.0 / n) * u;
    };

    LipschitzEstimate est;
    est.k1 = std::numeric_limits<double>::infinity();
    est.k2 = 0.0;
    auto record = [&](const Vec& x, const Vec& y) {
        // Closer pairs measure rounding in the coordinates, not the map.
        double dx = norm(x - y);
        if (dx < 1e-5 * std::max({1.0, norm(x), norm(y)})) return false;
        double q = norm(map.apply(x) - map.apply(y)) / dx;
        est.k1 = std::min(est.k1, q);
        est.k2 = std::max(est.k2, q);
        ++est.pairs;
        if (sink) sink->push_back({x, y, q});
        return true;
    };

    std::size_t attempts = 0;
    const std::size_t max_attempts = 50 * pairs + 1000;
    while (est.pairs < pairs && attempts < max_attempts) {
        ++attempts;
        std::size_t kind = attempts % 4;
        if (kind == 0) {
            record(sample_region(domain, rng), sample_region(domain, rng));
        } else if (kind == 1) {
            Vec x = sample_region(domain, rng);
            Vec y = x + (scale * std::exp(logd(rng))) * direction();
            if (dom.contains(y)) record(x, y);
        } else {
            std::size_t s = pick_seam(rng);
            auto p = sample_boundary_point(seams[s], fields[s], rng);
            if (!p) continue;
            Vec c = to_vec(*p);
            double delta = scale * std::exp(logd(rng));
            Vec u = direction();
            Vec x = c - (delta * frac(rng)) * u;
            Vec y = c + (delta * frac(rng)) * (kind == 2 ? u : direction());
            if (dom.contains(x) && dom.contains(y)) record(x, y);
        }
    }
    if (est.pairs == 0) throw DomainError("estimate_bi_lipschitz: no admissible pairs found");
    return est;
}

void write_quotients_csv(std::ostream& os, const std::vector<QuotientSample>& samples) {
    os << "x,y,quotient\n";
    os.precision(17);
    auto join = [&os](const Vec& v) {
        for (int k = 0; k < v.dim(); ++k) os << (k ? " " : "") << v[k];
    };
    for (const auto& s : samples) {
        join(s.x);
        os << ',';
        join(s.y);
        os << ',' << s.quotient << '\n';
    }
}

}  // namespace specflow
