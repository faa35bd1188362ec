#include <doctest.h>

#include "sequences.hpp"
#include "specflow/partial_actions.hpp"

using namespace specflow;
using namespace tb;

TEST_CASE("phi subtracts the anchor") {
    PASequence two;
    two.dim = 2;
    two.levels.resize(1);
    two.levels[0].classes.push_back(make_class(0, 0, Region(box2(0, 0, 6, 6)), QVec{c(2), c(2)}));
    two.finalize();
    CHECK(phi(two, 0, QVec{c(2), c(2)}) == QVec{c(0), c(0)});
    CHECK(phi(two, 0, QVec{c(3), c(5)}) == QVec{c(1), c(3)});
    CHECK_THROWS_AS(phi(two, 0, QVec{c(7), c(0)}), NotInDomain);
}

TEST_CASE("partial action inside a class") {
    PASequence s = sequence_1d({{{0, 10, 4}}});
    CHECK(*act_on(s, 0, QVec{c(0)}, QVec{c(5)}) == QVec{c(5)});
    CHECK(*act_on(s, 0, QVec{c(2)}, QVec{c(5)}) == QVec{c(7)});
    CHECK_FALSE(act_on(s, 0, QVec{c(100)}, QVec{c(5)}).has_value());
    CHECK(*act_on(s, 0, Vec{2.0}, Vec{5.0}) == Vec{7.0});
}

TEST_CASE("finalize rejects malformed sequences") {
    PASequence s;
    s.dim = 1;
    s.levels.resize(1);
    s.levels[0].classes.push_back(make_class(0, 0, interval(0, 4), QVec{c(9)}));
    CHECK_THROWS_AS(s.finalize(), MalformedSequence);
    s.levels[0].classes[0].anchor = QVec{c(1)};
    s.levels[0].classes.push_back(make_class(1, 0, interval(3, 8), QVec{c(5)}));
    CHECK_THROWS_AS(s.finalize(), MalformedSequence);
}

TEST_CASE("monotonicity") {
    CHECK(check_monotonicity(sequence_1d({{{0, 10, 5}}})).pass);
    CHECK(check_monotonicity(sequence_1d({{{0, 10, 5}, {20, 25, 22}}, {{-5, 15, 0}}})).pass);
    // Level-0 class [10, 20] sticks out of the level-1 class [0, 15].
    CheckResult bad = check_monotonicity(sequence_1d({{{10, 20, 12}}, {{0, 15, 5}}}));
    CHECK_FALSE(bad.pass);
    REQUIRE_FALSE(bad.failures.empty());
    CHECK(bad.failures[0].find("class 0") != std::string::npos);
}

TEST_CASE("coherence shifts are anchor differences") {
    PASequence s = sequence_1d({{{0, 10, 3}, {20, 30, 25}}, {{-5, 35, 1}}});
    CoherenceReport r = check_coherence(s, 16, 3);
    CHECK(r.check.pass);
    REQUIRE(r.shifts.size() == 2);
    CHECK(r.shifts[0].shift == QVec{c(2)});
    CHECK(r.shifts[1].shift == QVec{c(24)});
    CHECK(check_coherence(sequence_1d({{{0, 10, 5}}})).check.pass);
}

TEST_CASE("exhaustiveness") {
    PASequence s = sequence_1d({{{0, 10, 5}}, {{-20, 40, 0}}});
    auto zero = check_exhaustiveness(s, {Vec{1.0}, Vec{7.5}, Vec{-15.0}}, {Vec{0.0}});
    CHECK(zero.check.pass);
    CHECK(zero.coverage == 1.0);
    auto far = check_exhaustiveness(s, {Vec{1.0}}, {Vec{2.0}, Vec{100.0}}, 1.0);
    CHECK(far.coverage == 0.5);
    CHECK_FALSE(far.check.pass);
}

TEST_CASE("hat extension") {
    PASequence s = sequence_1d({{{0, 10, 5}}, {{-10, 15, 0}, {20, 30, 25}}, {{-20, 18, -1}}});
    HatSequence hat(s);
    // In X_0 and later levels: the class at the requested level applies.
    CHECK(hat.phi(0, Vec{7.0}) == Vec{2.0});
    CHECK(hat.phi(2, Vec{7.0}) == Vec{8.0});
    // In no X_m: singleton class, zero.
    CHECK(hat.phi(2, Vec{50.0}) == Vec{0.0});
    CHECK_FALSE(hat.class_of(2, Vec{50.0}).has_value());
    CHECK(hat.same_class(2, Vec{50.0}, Vec{50.0}));
    CHECK_FALSE(hat.same_class(2, Vec{50.0}, Vec{51.0}));
    // In X_1 but not X_2: the largest m <= n wins.
    CHECK(hat.phi(2, Vec{22.0}) == Vec{-3.0});
    CHECK(hat.class_of(2, Vec{22.0})->level == 1);
}

TEST_CASE("configuration signatures") {
    PASequence s = sequence_1d({{{0, 10, 3}, {100, 110, 103}, {200, 210, 204.5}},
                                {{-20, 30, 0}, {80, 130, 100}, {180, 230, 200}}});
    auto a = config_signature(s, {1, 0});
    CHECK(equivalent_configs(a, a));
    CHECK(equivalent_configs(a, config_signature(s, {1, 1})));
    CHECK_FALSE(equivalent_configs(a, config_signature(s, {1, 2})));
    CHECK(a.hash() == config_signature(s, {1, 1}).hash());
}

TEST_CASE("one-dimensional chain of partial actions") {
    ChainBersParams p;
    p.seed = 5;
    ChainBersResult r = build_chain_bers_1d(p);
    ChainBersResult again = build_chain_bers_1d(p);
    Report rep = verify_chain_bers(r);
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name);
    CHECK(r.sequence.levels.size() == again.sequence.levels.size());
    CHECK(r.cross_section.points == again.cross_section.points);
    REQUIRE(r.eps.size() >= 2);
    CHECK(r.eps[0] == Coord::ratio(1, 4));
    CHECK(r.eps[1] == Coord::ratio(1, 8));
    for (const Box& cell : r.voronoi) {
        Region inner(cell.grown(-r.eps[1])), outer(cell.grown(-r.eps[0]));
        CHECK(inner.contains(outer));
        CHECK_FALSE(inner == outer);
    }
    // Voronoi boundary points are in no level.
    REQUIRE_FALSE(r.residual.empty());
    for (const QVec& y : r.residual)
        for (const auto& lv : r.sequence.levels) CHECK_FALSE(lv.locate(y).has_value());
}
