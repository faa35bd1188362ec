#include "specflow/partial_actions.hpp"

#include <algorithm>
#include <random>

namespace specflow {

namespace {

double index_cell(const std::vector<PAClass>& classes, int dim) {
    if (classes.empty()) return 1.0;
    std::vector<double> ext;
    ext.reserve(classes.size());
    for (const auto& c : classes) {
        if (c.region.empty()) continue;
        Box h = c.region.hull();
        double e = 0.0;
        for (int k = 0; k < dim; ++k) e = std::max(e, h.extent(k).to_double());
        ext.push_back(e);
    }
    if (ext.empty()) return 1.0;
    std::nth_element(ext.begin(), ext.begin() + static_cast<long>(ext.size() / 2), ext.end());
    return std::max(ext[ext.size() / 2], 1e-3);
}

QVec random_point_in(const Region& r, std::mt19937_64& rng) {
    const auto& boxes = r.boxes();
    std::uniform_int_distribution<std::size_t> pick(0, boxes.size() - 1);
    const Box& b = boxes[pick(rng)];
    QVec x(b.dim());
    for (int k = 0; k < b.dim(); ++k) {
        std::uniform_int_distribution<std::int64_t> u(b.lo[k].raw(), b.hi[k].raw());
        x[k] = Coord::from_raw(u(rng));
    }
    return x;
}

}  // namespace

// ---------------------------------------------------------------- PALevel

template <class P>
std::optional<std::size_t> PALevel::locate_impl(const P& x) const {
    std::optional<std::size_t> found;
    auto test = [&](std::size_t i) {
        if (!classes[i].region.contains(x)) return;
        if (found && *found != i)
            throw MalformedSequence("point " + to_string(x) + " lies in classes " + std::to_string(*found) +
                                    " and " + std::to_string(i));
        found = i;
    };
    if (indexed_) {
        Vec xd;
        if constexpr (std::is_same_v<P, QVec>)
            xd = to_vec(x);
        else
            xd = x;
        // Floor of a quotient is monotone, so a box always shares a cell
        // with every point it contains.
        if (const auto* c = index_.candidates(xd))
            for (auto i : *c) test(i);
    } else {
        for (std::size_t i = 0; i < classes.size(); ++i) test(i);
    }
    return found;
}

std::optional<std::size_t> PALevel::locate(const QVec& x) const { return locate_impl(x); }
std::optional<std::size_t> PALevel::locate(const Vec& x) const { return locate_impl(x); }

std::vector<std::size_t> PALevel::meeting(const Box& b) const {
    std::vector<std::size_t> out;
    if (indexed_) {
        for (auto i : index_.query(b))
            if (classes[i].region.intersects(b)) out.push_back(i);
    } else {
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i].region.intersects(b)) out.push_back(i);
    }
    return out;
}

std::vector<Box> PALevel::domain_boxes() const {
    std::vector<Box> out;
    for (const auto& c : classes) out.insert(out.end(), c.region.boxes().begin(), c.region.boxes().end());
    return out;
}

Region PALevel::domain(int dim) const { return Region(dim, domain_boxes()); }

void PALevel::build_index(int dim) {
    index_ = BoxIndex(dim, index_cell(classes, dim));
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (const Box& b : classes[i].region.boxes()) index_.insert(static_cast<std::uint32_t>(i), b);
    indexed_ = true;
}

// ---------------------------------------------------------------- PASequence

void PASequence::finalize() {
    for (std::size_t n = 0; n < levels.size(); ++n) {
        auto& lv = levels[n];
        for (std::size_t i = 0; i < lv.classes.size(); ++i) {
            const PAClass& c = lv.classes[i];
            if (c.level != static_cast<int>(n))
                throw MalformedSequence("class " + std::to_string(i) + " stored at level " + std::to_string(n) +
                                        " claims level " + std::to_string(c.level));
            if (c.region.empty()) throw MalformedSequence("class with empty region at level " + std::to_string(n));
            if (c.region.dim() != dim || c.anchor.dim() != dim)
                throw MalformedSequence("class dimension mismatch at level " + std::to_string(n));
            if (!c.region.contains(c.anchor))
                throw MalformedSequence("anchor " + to_string(c.anchor) + " outside its class at level " +
                                        std::to_string(n));
        }
        lv.build_index(dim);
    }
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const auto& lv = levels[n];
        for (std::size_t i = 0; i < lv.classes.size(); ++i) {
            const PAClass& c = lv.classes[i];
            for (std::size_t j : lv.meeting(c.region.hull()))
                if (j > i && lv.classes[j].region.intersects(c.region))
                    throw MalformedSequence("classes " + std::to_string(i) + " and " + std::to_string(j) +
                                            " of level " + std::to_string(n) + " intersect");
            std::vector<Box> hulls;
            for (const ClassRef& r : c.children) {
                if (r.level >= c.level || r.level < 0 || r.index >= levels[r.level].classes.size())
                    throw MalformedSequence("bad child reference at level " + std::to_string(n));
                const PAClass& d = at(r);
                if (!c.region.contains(d.region))
                    throw MalformedSequence("child not contained in its parent at level " + std::to_string(n));
                hulls.push_back(d.region.hull());
            }
            for (std::size_t a = 0; a < c.children.size(); ++a)
                for (std::size_t b = a + 1; b < c.children.size(); ++b)
                    if (hulls[a].intersects(hulls[b]) && at(c.children[a]).region.intersects(at(c.children[b]).region))
                        throw MalformedSequence("children of a level-" + std::to_string(n) + " class intersect");
        }
    }
}

std::vector<std::vector<std::size_t>> PASequence::contained(ClassRef c) const {
    const PAClass& top_class = at(c);
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(c.level) + 1);
    Box h = top_class.region.hull();
    for (int m = 0; m < c.level; ++m)
        for (std::size_t j : levels[m].meeting(h))
            if (top_class.region.contains(levels[m].classes[j].region)) out[m].push_back(j);
    out[c.level].push_back(c.index);
    return out;
}

// ---------------------------------------------------------------- phi

namespace {

template <class P>
const PAClass& class_at(const PASequence& seq, int n, const P& x) {
    if (n < 0 || n > seq.top()) throw NotInDomain("level " + std::to_string(n) + " does not exist");
    auto i = seq.levels[n].locate(x);
    if (!i) throw NotInDomain("point " + to_string(x) + " is not in X_" + std::to_string(n));
    return seq.levels[n].classes[*i];
}

}  // namespace

Vec phi(const PASequence& seq, int n, const Vec& x) { return x - to_vec(class_at(seq, n, x).anchor); }

QVec phi(const PASequence& seq, int n, const QVec& x) { return x - class_at(seq, n, x).anchor; }

std::optional<Vec> act_on(const PASequence& seq, int n, const Vec& g, const Vec& x) {
    const PAClass& c = class_at(seq, n, x);
    Vec y = x + g;
    if (!c.region.contains(y)) return std::nullopt;
    return y;
}

std::optional<QVec> act_on(const PASequence& seq, int n, const QVec& g, const QVec& x) {
    const PAClass& c = class_at(seq, n, x);
    QVec y = x + g;
    if (!c.region.contains(y)) return std::nullopt;
    return y;
}

// ---------------------------------------------------------------- checks

CheckResult check_monotonicity(const PASequence& seq) {
    CheckResult r("monotonicity");
    for (int m = 0; m <= seq.top(); ++m)
        for (int n = m + 1; n <= seq.top(); ++n) {
            const auto& upper = seq.levels[n];
            for (const PAClass& d : seq.levels[m].classes) {
                ++r.samples;
                std::vector<std::size_t> hits;
                for (std::size_t j : upper.meeting(d.region.hull()))
                    if (upper.classes[j].region.intersects(d.region)) hits.push_back(j);
                if (hits.empty()) continue;
                ++r.counts["containments"];
                if (hits.size() > 1) {
                    r.fail("level-" + std::to_string(m) + " class " + std::to_string(d.id) + " meets " +
                           std::to_string(hits.size()) + " level-" + std::to_string(n) + " classes");
                    continue;
                }
                if (!upper.classes[hits[0]].region.contains(d.region))
                    r.fail("level-" + std::to_string(m) + " class " + std::to_string(d.id) +
                           " meets but is not inside level-" + std::to_string(n) + " class " +
                           std::to_string(upper.classes[hits[0]].id));
            }
        }
    return r;
}

CoherenceReport check_coherence(const PASequence& seq, std::size_t samples_per_class, std::uint64_t seed) {
    CoherenceReport out;
    CheckResult& r = out.check;
    std::mt19937_64 rng(seed);
    for (int m = 0; m <= seq.top(); ++m)
        for (std::size_t di = 0; di < seq.levels[m].classes.size(); ++di) {
            const PAClass& d = seq.levels[m].classes[di];
            for (int n = m + 1; n <= seq.top(); ++n) {
                const auto& upper = seq.levels[n];
                std::optional<std::size_t> host;
                for (std::size_t j : upper.meeting(d.region.hull()))
                    if (upper.classes[j].region.contains(d.region)) host = j;
                if (!host) continue;
                const PAClass& c = upper.classes[*host];
                QVec expected = d.anchor - c.anchor;
                std::vector<QVec> xs{d.anchor};
                for (std::size_t s = 0; s < samples_per_class; ++s) xs.push_back(random_point_in(d.region, rng));
                for (const QVec& x : xs) {
                    ++r.samples;
                    QVec s = phi(seq, n, x) - phi(seq, m, x);
                    if (!(s == expected)) {
                        r.fail("shift " + to_string(s) + " differs from " + to_string(expected) + " for level-" +
                               std::to_string(m) + " class " + std::to_string(d.id) + " in level-" +
                               std::to_string(n) + " class " + std::to_string(c.id));
                        r.max_error = std::max(r.max_error, norm(to_vec(s - expected)));
                    }
                }
                out.shifts.push_back({ClassRef{m, di}, ClassRef{n, *host}, expected});
            }
        }
    r.counts["containments"] = static_cast<std::int64_t>(out.shifts.size());
    return out;
}

ExhaustivenessReport check_exhaustiveness(const PASequence& seq, const std::vector<Vec>& xs,
                                          const std::vector<Vec>& gs, double required_coverage) {
    ExhaustivenessReport out;
    for (const Vec& x : xs)
        for (const Vec& g : gs) {
            ++out.tested;
            Vec y = x + g;
            for (int n = 0; n <= seq.top(); ++n) {
                auto i = seq.levels[n].locate(x);
                if (i && seq.levels[n].classes[*i].region.contains(y)) {
                    ++out.satisfied;
                    break;
                }
            }
        }
    out.coverage = out.tested ? static_cast<double>(out.satisfied) / static_cast<double>(out.tested) : 1.0;
    out.check.samples = out.tested;
    out.check.metrics["coverage"] = out.coverage;
    out.check.counts["satisfied"] = static_cast<std::int64_t>(out.satisfied);
    out.check.note = "bounded certification: only sampled translations within the configured radius";
    if (out.coverage < required_coverage)
        out.check.fail("coverage " + std::to_string(out.coverage) + " below " + std::to_string(required_coverage));
    return out;
}

// ---------------------------------------------------------------- hat extension

std::optional<ClassRef> HatSequence::class_of(int n, const Vec& x) const {
    for (int m = std::min(n, seq_->top()); m >= 0; --m)
        if (auto i = seq_->levels[m].locate(x)) return ClassRef{m, *i};
    return std::nullopt;
}

Vec HatSequence::phi(int n, const Vec& x) const {
    auto c = class_of(n, x);
    if (!c) return Vec(x.dim(), 0.0);
    return x - to_vec(seq_->at(*c).anchor);
}

bool HatSequence::same_class(int n, const Vec& x, const Vec& y) const {
    if (x == y) return true;
    auto a = class_of(n, x);
    auto b = class_of(n, y);
    return a && b && *a == *b;
}

// ---------------------------------------------------------------- signatures

ConfigSignature config_signature(const PASequence& seq, ClassRef c) {
    ConfigSignature sig;
    sig.level = c.level;
    const QVec shift = -seq.at(c).anchor;
    auto groups = seq.contained(c);
    sig.per_level.resize(groups.size());
    for (std::size_t m = 0; m < groups.size(); ++m) {
        auto& out = sig.per_level[m];
        for (std::size_t j : groups[m]) {
            const PAClass& d = seq.levels[m].classes[j];
            out.emplace_back(d.region.translated(shift), d.anchor + shift);
        }
        std::sort(out.begin(), out.end());
    }
    return sig;
}

bool equivalent_configs(const ConfigSignature& a, const ConfigSignature& b) { return a == b; }

std::size_t ConfigSignature::hash() const {
    std::size_t h = static_cast<std::size_t>(level) * 0x9e3779b97f4a7c15ull;
    auto mix = [&h](std::int64_t v) { h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    for (const auto& lv : per_level) {
        mix(static_cast<std::int64_t>(lv.size()));
        for (const auto& [reg, anchor] : lv) {
            for (const Box& b : reg.boxes())
                for (int k = 0; k < b.dim(); ++k) {
                    mix(b.lo[k].raw());
                    mix(b.hi[k].raw());
                }
            for (Coord x : anchor) mix(x.raw());
        }
    }
    return h;
}

}  // namespace specflow
