#include "specflow/experiments.hpp"

#include <cmath>
#include <sstream>

#include "specflow/serialize.hpp"
#include "specflow/svg.hpp"

namespace specflow {

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"toast", "gridflow", "suspend", "katok", "lipschitz"};
    return names;
}

ToastParams toast_params(const ExperimentConfig& cfg, Coord default_k) {
    ToastParams p;
    p.dim = cfg.d;
    p.K = cfg.K ? *cfg.K : default_k;
    p.gamma = cfg.gamma;
    p.levels = cfg.levels;
    p.window = cfg.window;
    p.seed = cfg.seed;
    p.lattice_resolution = cfg.lattice_resolution;
    return p;
}

// ---------------------------------------------------------------- random inputs

Region random_box_union(int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 4), side(6, 24), corner(-20, 4);
    std::vector<Box> boxes;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        QVec lo(d), hi(d);
        for (int k = 0; k < d; ++k) {
            int a;
            if (boxes.empty()) {
                a = corner(rng);
            } else {
                // Start inside the previous box so the union stays connected.
                const Box& prev = boxes.back();
                std::uniform_int_distribution<int> in(static_cast<int>(prev.lo[k].floor_int()),
                                                      static_cast<int>(prev.hi[k].floor_int()) - 1);
                a = in(rng);
            }
            int b = std::min(a + side(rng), 20);
            if (b - a < 2) a = b - 6;
            lo[k] = Coord(a);
            hi[k] = Coord(b);
        }
        boxes.emplace_back(lo, hi);
    }
    return Region(d, std::move(boxes));
}

QVec random_shift(int d, Coord len, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> frac(-1024, 1024);
    std::uniform_int_distribution<int> axis(0, d - 1);
    std::bernoulli_distribution sign(0.5);
    QVec v(d);
    for (int k = 0; k < d; ++k) {
        Coord c = Coord::from_raw(len.raw() / 1024 * frac(rng));
        v[k] = c;
    }
    v[axis(rng)] = sign(rng) ? len : -len;
    return v;
}

Coord dyadic_ceiling(const OrbitPoint& z, std::uint64_t seed) {
    std::uint64_t x = static_cast<std::uint64_t>(z.index[0]) ^ (seed * 0x9e3779b97f4a7c15ULL) ^ (std::uint64_t{z.seed} << 40);
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return Coord::ratio(8 + static_cast<std::int64_t>(x % 8), 8);
}

// ---------------------------------------------------------------- toast

Report run_toast(const ExperimentConfig& cfg, std::shared_ptr<const ToastHierarchy>* keep) {
    Report rep;
    rep.command = "toast";
    ToastParams tp = toast_params(cfg, Coord(1));
    auto h = std::make_shared<ToastHierarchy>(build_toast(tp));
    rep.append(verify_toast_invariants(*h));
    rep.add(check_monotonicity(h->sequence));
    rep.add(check_coherence(h->sequence, 4, cfg.seed).check);
    auto cov = toast_coverage(*h, cfg.samples, cfg.seed + 1, std::nullopt, 1.0);
    cov.check.name = "coverage";
    rep.add(cov.check);

    // Bounded exhaustiveness over small translations; reported, not required.
    std::mt19937_64 rng(cfg.seed + 2);
    std::vector<Vec> xs, gs;
    const int d = tp.dim;
    for (std::size_t i = 0; i < 100; ++i) {
        Vec x(d);
        for (int k = 0; k < d; ++k) {
            std::uniform_real_distribution<double> u(cov.interior.lo[k].to_double(), cov.interior.hi[k].to_double());
            x[k] = u(rng);
        }
        xs.push_back(x);
    }
    std::uniform_real_distribution<double> g(-tp.K.to_double(), tp.K.to_double());
    gs.push_back(Vec(d));
    for (int i = 0; i < 9; ++i) {
        Vec v(d);
        for (auto& c : v) c = g(rng);
        gs.push_back(v);
    }
    rep.add(check_exhaustiveness(h->sequence, xs, gs, 0.0).check);
    if (keep) *keep = h;
    return rep;
}

// ---------------------------------------------------------------- lipschitz

namespace {

void bound_check(CheckResult& c, const LipschitzEstimate& e, double lo, double hi, const std::string& where) {
    c.samples += e.pairs;
    double k1 = c.metrics.count("k1") ? std::min(c.metrics["k1"], e.k1) : e.k1;
    double k2 = c.metrics.count("k2") ? std::max(c.metrics["k2"], e.k2) : e.k2;
    c.metrics["k1"] = k1;
    c.metrics["k2"] = k2;
    c.max_error = std::max({c.max_error, lo - e.k1, e.k2 - hi, 0.0});
    if (e.k1 < lo || e.k2 > hi)
        c.fail(where + ": estimate [" + std::to_string(e.k1) + ", " + std::to_string(e.k2) + "] outside [" +
               std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

double distance_to(const Region& s, const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Box& b : s.boxes()) best = std::min(best, distance(b, x));
    return best;
}

}  // namespace

Report run_lipschitz(const ExperimentConfig& cfg, std::vector<QuotientSample>* csv) {
    Report rep;
    rep.command = "lipschitz";
    CheckResult fc("shift_f_constants"), hc("shift_h_constants"), rc("restriction_identity");
    const Coord K = cfg.shift_K;
    const double ratio = cfg.shift_norm.to_double() / K.to_double();
    const double lo = 1.0 - ratio - 1e-9, hi = 1.0 + ratio + 1e-9;
    for (std::size_t i = 0; i < cfg.regions; ++i) {
        const int d = 1 + static_cast<int>(i % 3);
        std::mt19937_64 rng(cfg.seed * 1000003ULL + i);
        Region a = random_box_union(d, rng);
        QVec v = random_shift(d, cfg.shift_norm, rng);
        const std::string tag = "region " + std::to_string(i) + " (d=" + std::to_string(d) + ")";

        ShiftMap f(ShiftSpec{a, K, v, std::nullopt});
        ShiftMap h(ShiftSpec{a, K, v, K});
        std::vector<QuotientSample>* sink = (csv && csv->size() < cfg.csv_limit) ? csv : nullptr;
        bound_check(fc, estimate_bi_lipschitz(f, a, cfg.pairs, rng(), sink), lo, hi, tag);
        bound_check(hc, estimate_bi_lipschitz(h, a, cfg.pairs, rng()), lo, hi, tag);
        if (csv && csv->size() > cfg.csv_limit) csv->resize(cfg.csv_limit);

        Region inner = shrink(a, K);
        if (inner.empty()) {
            ++rc.counts["empty_inner"];
            continue;
        }
        ShiftMap fl(ShiftSpec{inner, K, v, std::nullopt});
        const Vec lift = (1.0) * to_vec(v);  // (L/K) v with L = K
        for (std::size_t s = 0; s < cfg.pairs; ++s) {
            Vec x = sample_region(inner, rng);
            double err = norm(f.apply(x) - (fl.apply(x) + lift));
            ++rc.samples;
            rc.max_error = std::max(rc.max_error, err);
            if (!(err <= 1e-12)) rc.fail(tag + ": discrepancy " + std::to_string(err) + " at " + to_string(x));
        }
    }
    fc.metrics["alpha_minus"] = 1.0 - ratio;
    fc.metrics["alpha_plus"] = 1.0 + ratio;
    hc.metrics["alpha_minus"] = 1.0 - ratio;
    hc.metrics["alpha_plus"] = 1.0 + ratio;
    rep.add(fc);
    rep.add(hc);
    rep.add(rc);

    // x + xi(x) with 0.3-Lipschitz xi stays (0.7, 1.3)-bi-Lipschitz.
    const double c = 0.3;
    for (int which = 1; which <= 3; ++which) {
        CheckResult pc("perturbation_xi" + std::to_string(which));
        for (int d = 1; d <= 3; ++d) {
            std::mt19937_64 rng(cfg.seed * 7919ULL + static_cast<std::uint64_t>(which * 10 + d));
            Region dom(Box::ball(QVec(d), Coord(30)));
            Region s = random_box_union(d, rng);
            Vec u = to_vec(random_shift(d, Coord(1), rng));
            std::function<Vec(const Vec&)> fn;
            if (which == 1)
                fn = [c](const Vec& x) {
                    Vec y = x;
                    for (auto& t : y) t += c * std::clamp(t, -1.0, 1.0);
                    return y;
                };
            else if (which == 2)
                fn = [c, s, u](const Vec& x) { return x + (c * distance_to(s, x)) * u; };
            else
                fn = [c](const Vec& x) {
                    Vec y = x;
                    for (int k = 0; k < x.dim(); ++k) y[k] += c * std::sin(x[(k + 1) % x.dim()]);
                    return y;
                };
            FunctionMap m(d, fn);
            bound_check(pc, estimate_bi_lipschitz(m, dom, cfg.pairs, rng()), 1 - c - 1e-9, 1 + c + 1e-9,
                        "d=" + std::to_string(d));
        }
        rep.add(pc);
    }
    return rep;
}

// ---------------------------------------------------------------- suspension

Report run_suspend(const ExperimentConfig& cfg) {
    Report rep;
    rep.command = "suspend";
    const std::uint64_t seed = cfg.seed;
    const std::int64_t radius = 1000000;
    SuspensionSystem1D<Coord> ex{[seed](const OrbitPoint& z) { return dyadic_ceiling(z, seed); }, Coord(1), radius};
    SuspensionSystem1D<double> fl{[seed](const OrbitPoint& z) { return dyadic_ceiling(z, seed).to_double(); }, 1.0,
                                  radius};
    const Coord delta = Coord::ratio(1, 8);

    CheckResult oe("oracle_exact"), of("oracle_float"), rt("roundtrip"), add("additivity");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> zi(-500, 500);
    const std::int64_t rmax = static_cast<std::int64_t>(std::floor(cfg.max_r * 1024));
    std::uniform_int_distribution<std::int64_t> rr(-rmax, rmax);
    std::uniform_int_distribution<std::int64_t> tt(0, 1 << 20);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        OrbitPoint z{0, IVec{zi(rng)}};
        Coord f = dyadic_ceiling(z, seed);
        Coord t = Coord::from_raw(f.raw() / 1024 * (tt(rng) % 1024));
        Coord r = Coord::ratio(rr(rng), 1024), s = Coord::ratio(rr(rng), 1024);
        SuspPoint<Coord> p{z, t};
        SuspPoint<double> pd{z, t.to_double()};

        auto a = suspend1d(ex, p, r);
        auto b = suspend1d_stepping(ex, p, r, delta);
        ++oe.samples;
        if (!(a == b)) oe.fail("exact modes disagree at " + to_string(z) + " r=" + r.str());

        auto ad = suspend1d(fl, pd, r.to_double());
        auto bd = suspend1d_stepping(fl, pd, r.to_double(), delta.to_double());
        double err = ad.z == bd.z ? std::abs(ad.t - bd.t) : std::numeric_limits<double>::infinity();
        double err2 = ad.z == a.z ? std::abs(ad.t - a.t.to_double()) : std::numeric_limits<double>::infinity();
        ++of.samples;
        of.max_error = std::max({of.max_error, err, err2});
        if (!(err <= 1e-12) || !(err2 <= 1e-12)) of.fail("float mode off by " + std::to_string(std::max(err, err2)));

        ++rt.samples;
        if (!(suspend1d(ex, a, -r) == p)) rt.fail("exact round trip fails at " + to_string(z) + " r=" + r.str());
        auto back = suspend1d(fl, ad, -r.to_double());
        double rerr = back.z == pd.z ? std::abs(back.t - pd.t) : std::numeric_limits<double>::infinity();
        rt.max_error = std::max(rt.max_error, rerr);
        if (!(rerr <= 1e-12)) rt.fail("float round trip off by " + std::to_string(rerr));

        ++add.samples;
        if (!(suspend1d(ex, a, s) == suspend1d(ex, p, r + s)))
            add.fail("additivity fails at " + to_string(z) + " r=" + r.str() + " s=" + s.str());
    }
    rep.add(oe);
    rep.add(of);
    rep.add(rt);
    rep.add(add);
    rep.add(cross_check_suspension(fl, std::min<std::size_t>(cfg.samples, 1000), cfg.max_r, seed + 1));
    return rep;
}

// ---------------------------------------------------------------- dispatch

namespace {

std::string checks_csv(const Report& r) {
    std::ostringstream os;
    os.precision(17);
    os << "name,status,samples,max_error\n";
    for (const auto& c : r.checks) os << c.name << ',' << (c.pass ? "pass" : "fail") << ',' << c.samples << ',' << c.max_error << '\n';
    return os.str();
}

ClassRef picture_class(const DeformationAtlas& atlas) {
    ClassRef best{0, 0};
    double area = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= atlas.top(); ++n) {
        for (const auto& e : atlas.levels[n]) {
            if (e.children.empty()) continue;
            Box h = e.image.hull();
            double a = 1.0;
            for (int k = 0; k < atlas.dim; ++k) a *= h.extent(k).to_double();
            if (a < area) {
                area = a;
                best = e.ref;
            }
        }
        if (area < std::numeric_limits<double>::infinity()) break;
    }
    return best;
}

}  // namespace

ExperimentResult run_command(const std::string& command, const ExperimentConfig& cfg, const std::string& format) {
    if (format != "json" && format != "csv" && format != "svg")
        throw ConfigError("format", "must be json, csv or svg (got '" + format + "')");
    cfg.validate();
    ExperimentResult out;
    if (command == "toast") {
        std::shared_ptr<const ToastHierarchy> h;
        out.report = run_toast(cfg, &h);
        if (format == "svg") out.artifacts.push_back({"toast.svg", svg_toast(*h)});
    } else if (command == "gridflow") {
        GridflowParams gp;
        gp.alpha = cfg.alpha;
        gp.seed = cfg.seed;
        gp.toast = toast_params(cfg, choose_constants(cfg.alpha).K);
        gp.match_toast_k = !cfg.K;
        GridflowBuild build;
        out.report = run_gridflow(gp, &build);
        if (build.atlas) {
            ClassRef c = picture_class(*build.atlas);
            if (c.level > 0) out.artifacts.push_back({"gridflow_class.svg", svg_grid_class(*build.atlas, c)});
            if (format == "svg") out.artifacts.push_back({"toast.svg", svg_toast(*build.toast)});
        }
    } else if (command == "suspend") {
        if (cfg.d != 1) throw ConfigError("d", "suspend runs in dimension 1");
        out.report = run_suspend(cfg);
    } else if (command == "katok") {
        KatokParams kp;
        kp.dim = cfg.d;
        kp.alpha = cfg.alpha;
        kp.seed = cfg.seed;
        kp.levels = cfg.levels;
        kp.gamma = cfg.gamma;
        kp.window = cfg.window;
        kp.samples = cfg.samples;
        kp.max_flow = cfg.max_flow;
        kp.tol = cfg.tol;
        out.report = katok_pipeline(kp);
    } else if (command == "lipschitz") {
        std::vector<QuotientSample> q;
        out.report = run_lipschitz(cfg, &q);
        std::ostringstream os;
        write_quotients_csv(os, q);
        out.artifacts.push_back({"quotients.csv", os.str()});
    } else {
        throw ConfigError("command", "unknown command '" + command + "'");
    }
    if (format == "csv") out.artifacts.push_back({"checks.csv", checks_csv(out.report)});
    return out;
}

}  // namespace specflow
