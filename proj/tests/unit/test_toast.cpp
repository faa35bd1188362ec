#include <doctest.h>

#include <algorithm>

#include "sequences.hpp"
#include "specflow/toast.hpp"

using namespace specflow;
using namespace tb;

namespace {

const CheckResult& get(const Report& r, const std::string& name) {
    const CheckResult* c = r.find(name);
    REQUIRE_MESSAGE(c != nullptr, name);
    return *c;
}

}  // namespace

TEST_CASE("cross sections are maximal, lacunary and on the lattice") {
    ToastParams p;
    p.dim = 1;
    p.K = 1;
    p.gamma = 10;
    p.levels = 0;
    p.window = box1(0, 10000);
    auto cs = generate_cross_sections(p);
    REQUIRE(cs.size() == 1);
    std::vector<double> pts;
    for (const QVec& q : cs[0].points) pts.push_back(q[0].to_double());
    std::sort(pts.begin(), pts.end());
    REQUIRE(pts.size() > 100);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] - pts[i - 1] > 10.0);
    double worst = 0.0;
    for (int k = 0; k <= 20000; ++k) {
        double x = 0.5 * k;
        auto it = std::lower_bound(pts.begin(), pts.end(), x);
        double d = 1e300;
        if (it != pts.end()) d = *it - x;
        if (it != pts.begin()) d = std::min(d, x - *(it - 1));
        worst = std::max(worst, d);
    }
    CHECK(worst <= 10.0);
}

TEST_CASE("level 0 classes are the anchor boxes") {
    ToastParams p;
    p.dim = 2;
    p.K = 1;
    p.levels = 0;
    p.window = box2(-200, -200, 200, 200);
    ToastHierarchy h = build_toast(p);
    const Coord r = p.radius(0).divided(10);
    REQUIRE(h.sequence.levels.size() == 1);
    const auto& pts = h.cross_sections[0].points;
    // Points within a_0 of the window edge are dropped, the rest kept.
    std::size_t inner = 0;
    for (const QVec& q : pts) inner += h.window.grown(-p.radius(0)).contains(q);
    CHECK(h.sequence.levels[0].classes.size() >= inner);
    CHECK(h.sequence.levels[0].classes.size() > 20);
    for (const PAClass& c : h.sequence.levels[0].classes) {
        CHECK(c.region == Region(Box::ball(c.anchor, r)));
        CHECK(std::find(pts.begin(), pts.end(), c.anchor) != pts.end());
    }
    Report rep = verify_toast_invariants(h);
    CHECK(rep.all_pass());
    CHECK(rep.find("anchor_ball"));
    CHECK(rep.find("diameter"));
    CHECK(rep.find("separation"));
    CHECK_FALSE(rep.find("child_clearance"));
    CHECK_FALSE(rep.find("finite_subclasses"));
}

TEST_CASE("children keep K clearance and nest") {
    ToastParams p;
    p.dim = 2;
    p.K = 1;
    p.levels = 1;
    p.seed = 3;
    ToastHierarchy h = build_toast(p);
    const PASequence& s = h.sequence;
    std::size_t kids = 0;
    for (const PAClass& c : s.levels[1].classes)
        for (const ClassRef& d : c.children) {
            ++kids;
            CHECK(c.region.contains(fatten(s.at(d).region, p.K)));
        }
    CHECK(kids > 0);
    CHECK(check_monotonicity(s).pass);
    CHECK(check_coherence(s).check.pass);
    CHECK(verify_toast_invariants(h).all_pass());
    // Anchors are exact dyadic rationals, so anchor differences are rational.
    std::size_t on_lattice = 0, total = 0;
    for (const PointSet& cs : h.cross_sections)
        for (const QVec& q : cs.points) {
            ++total;
            bool on = true;
            for (Coord x : q) {
                CHECK(Coord::from_double(x.to_double()) == x);
                on = on && (x * p.lattice_resolution).is_integer();
            }
            on_lattice += on;
        }
    // Off-lattice points only come from free pieces thinner than a lattice step.
    CHECK(on_lattice * 10 >= total * 9);
}

TEST_CASE("one dimension with a large gamma") {
    ToastParams p;
    p.dim = 1;
    p.K = 1;
    p.gamma = 1000;
    p.levels = 1;
    ToastHierarchy h = build_toast(p);
    for (const auto& c : verify_toast_invariants(h).checks) CHECK_MESSAGE(c.pass, c.name);
    CHECK(check_monotonicity(h.sequence).pass);
}

TEST_CASE("a child touching the boundary fails the clearance check") {
    ToastHierarchy h;
    h.params.dim = 1;
    h.params.K = 1;
    h.params.gamma = 10;
    h.params.levels = 1;
    h.window = box1(-200, 200);
    h.sequence = sequence_1d({{{-1, 1, 0}}, {{-1, 30, 5}}});
    h.cross_sections = {PointSet{1, {QVec{c(0)}}, Coord(10), true}, PointSet{1, {QVec{c(5)}}, Coord(100), true}};
    Report rep = verify_toast_invariants(h);
    CHECK_FALSE(get(rep, "child_clearance").pass);
    CHECK(get(rep, "anchor_ball").pass);
    CHECK(get(rep, "diameter").pass);
    CHECK(get(rep, "separation").pass);
}

TEST_CASE("parameter validation names the field") {
    ToastParams p;
    p.gamma = 5;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("gamma"), DomainError);
    p.gamma = 20;
    p.dim = 4;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("dimension"), DomainError);
    p.dim = 2;
    p.window = box2(0, 0, 10, 10);
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("coverage of the window interior") {
    ToastParams p;
    p.dim = 2;
    p.K = 1;
    p.levels = 1;
    ToastHierarchy h = build_toast(p);
    auto cov = toast_coverage(h, 2000, 9, std::nullopt, 1.0);
    CHECK(cov.check.pass);
    CHECK(cov.fraction == 1.0);
}

TEST_CASE("same seed, same toast") {
    ToastParams p;
    p.dim = 2;
    p.levels = 1;
    p.seed = 11;
    ToastHierarchy a = build_toast(p), b = build_toast(p);
    REQUIRE(a.sequence.levels[1].classes.size() == b.sequence.levels[1].classes.size());
    for (std::size_t i = 0; i < a.sequence.levels[1].classes.size(); ++i)
        CHECK(a.sequence.levels[1].classes[i].region == b.sequence.levels[1].classes[i].region);
}
