#include <random>

#include "specflow/partial_actions.hpp"

namespace specflow {

namespace {

constexpr std::int64_t kGap = 4;  // cross-section points are (-4, 4)-lacunary

Coord snap_down(Coord x, std::int64_t res) {
    std::int64_t q = Coord::kOne / res;
    std::int64_t r = x.raw();
    std::int64_t f = r >= 0 ? r / q : -((-r + q - 1) / q);
    return Coord::from_raw(f * q);
}

QVec q1(Coord x) {
    QVec v(1);
    v[0] = x;
    return v;
}

}  // namespace

ChainBersResult build_chain_bers_1d(const ChainBersParams& p) {
    if (p.lattice_resolution < 1 || p.lattice_resolution > (Coord::kOne >> 1) ||
        (Coord::kOne % p.lattice_resolution) != 0)
        throw DomainError("lattice_resolution must be a power of two between 1 and 2^19");
    if (p.window_hi - p.window_lo < Coord(2 * kGap))
        throw DomainError("window too small to host a lacunary point (needs length >= 8)");
    const std::int64_t res = p.lattice_resolution;
    const Coord step = Coord::ratio(1, res);
    std::mt19937_64 rng(p.seed);
    std::uniform_int_distribution<std::int64_t> jitter(0, 4 * res - 1);

    ChainBersResult out;
    out.cross_section.dim = 1;
    out.cross_section.lacunarity_radius = Coord(kGap);
    out.cross_section.lacunary = true;
    auto& pts = out.cross_section.points;
    // First point at distance in [2, 4) from the left end so its cell is wide.
    Coord c = p.window_lo + Coord(2) + step * (jitter(rng) / 2);
    while (c <= p.window_hi - Coord(2)) {
        pts.push_back(q1(c));
        c = snap_down(c + Coord(kGap) + step + step * jitter(rng), res);
    }
    if (pts.empty()) throw DomainError("window too small to host a lacunary point");

    const std::size_t npts = pts.size();
    std::vector<Coord> lo(npts), hi(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        lo[i] = i == 0 ? p.window_lo : (pts[i - 1][0] + pts[i][0]).half();
        hi[i] = i + 1 == npts ? p.window_hi : (pts[i][0] + pts[i + 1][0]).half();
        out.voronoi.emplace_back(q1(lo[i]), q1(hi[i]));
        if (i > 0) out.residual.push_back(q1(lo[i]));
    }

    int levels = p.levels;
    if (levels < 0) {
        levels = 0;
        while ((std::size_t{1} << levels) < npts) ++levels;
    }
    if (levels > 17) throw DomainError("at most 18 levels fit the 2^-20 lattice");

    PASequence& seq = out.sequence;
    seq.dim = 1;
    seq.levels.resize(static_cast<std::size_t>(levels) + 1);
    for (int n = 0; n <= levels; ++n) {
        Coord eps = Coord::ratio(1, std::int64_t{1} << (n + 2));
        out.eps.push_back(eps);
        auto& cls = seq.levels[n].classes;
        std::size_t blocks = ((npts - 1) >> n) + 1;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t first = b << n;
            std::size_t last = std::min(npts, (b + 1) << n);
            std::vector<Box> boxes;
            for (std::size_t i = first; i < last; ++i) boxes.emplace_back(q1(lo[i] + eps), q1(hi[i] - eps));
            PAClass pc;
            pc.id = b;
            pc.level = n;
            pc.region = Region(1, std::move(boxes));
            pc.anchor = pts[first];
            if (n > 0) {
                pc.children.push_back(ClassRef{n - 1, 2 * b});
                if (((2 * b + 1) << (n - 1)) < npts) pc.children.push_back(ClassRef{n - 1, 2 * b + 1});
            }
            cls.push_back(std::move(pc));
        }
    }
    seq.finalize();
    return out;
}

Report verify_chain_bers(const ChainBersResult& r) {
    Report rep;
    rep.command = "chain_bers";
    const PASequence& seq = r.sequence;

    CheckResult lac("lacunary");
    lac.samples = r.cross_section.points.size();
    if (!check_lacunary(r.cross_section, r.cross_section.lacunarity_radius)) lac.fail("points closer than 4");
    rep.add(lac);
    rep.add(check_monotonicity(seq));
    rep.add(check_coherence(seq).check);

    CheckResult fin("finite_subclasses");
    std::int64_t most = 0;
    for (const auto& lv : seq.levels)
        for (const auto& c : lv.classes) most = std::max<std::int64_t>(most, static_cast<std::int64_t>(c.children.size()));
    fin.counts["max_children"] = most;
    rep.add(fin);

    CheckResult base("level0_interior");
    for (const auto& c : seq.levels.front().classes) {
        ++base.samples;
        if (c.region.empty()) base.fail("empty level-0 class " + std::to_string(c.id));
    }
    rep.add(base);

    CheckResult fresh("new_points_interior");
    for (int n = 0; n < seq.top(); ++n)
        for (const auto& c : seq.levels[n + 1].classes) {
            ++fresh.samples;
            std::vector<Box> lower;
            for (std::size_t j : seq.levels[n].meeting(c.region.hull()))
                for (const Box& b : seq.levels[n].classes[j].region.boxes()) lower.push_back(b);
            if (subtract(c.region, Region(1, lower)).empty())
                fresh.fail("level-" + std::to_string(n + 1) + " class " + std::to_string(c.id) +
                           " has no interior outside X_" + std::to_string(n));
        }
    rep.add(fresh);

    CheckResult strict("strict_shrink");
    if (r.eps.size() >= 2)
        for (const Box& cell : r.voronoi) {
            ++strict.samples;
            Region a(cell.grown(-r.eps[1]));
            Region b(cell.grown(-r.eps[0]));
            if (!(a.contains(b) && !(a == b))) strict.fail("cell " + to_string(cell.lo) + " does not shrink strictly");
        }
    rep.add(strict);

    CheckResult resid("residual_outside");
    for (const QVec& y : r.residual) {
        ++resid.samples;
        for (int n = 0; n <= seq.top(); ++n)
            if (seq.levels[n].locate(y)) resid.fail("boundary point " + to_string(y) + " lies in X_" + std::to_string(n));
    }
    rep.add(resid);
    return rep;
}

}  // namespace specflow
