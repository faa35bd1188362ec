#include <doctest.h>

#include <random>

#include "build.hpp"
#include "specflow/geometry.hpp"

using namespace specflow;
using namespace tb;

TEST_CASE("sup norm") {
    CHECK(norm(Vec{0.0, 0.0}) == 0.0);
    CHECK(norm(Vec{0.3, -0.6}) == 0.6);
    CHECK(norm(Vec{1.0, 1.0}) == 1.0);
    CHECK(norm(QVec{c(0.25), c(-1.5)}) == c(1.5));
    CHECK(norm(IVec{3, -7, 2}) == 7);
}

TEST_CASE("coord arithmetic is exact") {
    CHECK(Coord::ratio(7, 8).to_double() == 0.875);
    CHECK(Coord::parse("7/8") == Coord::ratio(7, 8));
    CHECK(Coord::parse("-2.5") == c(-2.5));
    CHECK(Coord::parse("1e3") == Coord(1000));
    CHECK_THROWS_AS(Coord::ratio(1, 3), DomainError);
    CHECK_THROWS_AS(Coord::from_double(0.1), DomainError);
    CHECK(c(2.5).floor_int() == 2);
    CHECK(c(-2.5).floor_int() == -3);
    CHECK(c(-2.5).ceil_int() == -2);
    Coord sum;
    for (int i = 0; i < 1000; ++i) sum += Coord::ratio(1, 1024);
    CHECK(sum == Coord::ratio(1000, 1024));
}

TEST_CASE("fatten") {
    Region sq(box2(0, 0, 1, 1));
    CHECK(fatten(sq, Coord(0)) == sq);
    CHECK(fatten(interval(0, 1), Coord(2)) == interval(-2, 3));
    Region two(1, {box1(0, 1), box1(5, 6)});
    CHECK(fatten(two, Coord(2)) == interval(-2, 8));
}

TEST_CASE("boundary distance") {
    Region a = interval(0, 10);
    CHECK(boundary_distance(a, QVec{c(0)}) == Coord(0));
    CHECK(boundary_distance(a, QVec{c(3)}) == Coord(3));
    CHECK(boundary_distance(Region(box2(0, 0, 4, 4)), QVec{c(1), c(2)}) == Coord(1));
    CHECK_THROWS_AS(boundary_distance(a, QVec{c(11)}), DomainError);
    // An L-shape: the inner corner is the nearest boundary point.
    Region l(2, {box2(0, 0, 10, 4), box2(0, 0, 4, 10)});
    CHECK(boundary_distance(l, QVec{c(3), c(3)}) == Coord(1));
    CHECK(boundary_distance(l, Vec{3.5, 3.0}) == doctest::Approx(1.0));
    CHECK(boundary_distance(l, Vec{8.5, 3.0}) == doctest::Approx(1.0));
    CHECK(boundary_distance(l, Vec{1.0, 9.25}) == doctest::Approx(0.75));
}

TEST_CASE("shrink") {
    CHECK(shrink(interval(0, 10), Coord(0)) == interval(0, 10));
    CHECK(shrink(interval(0, 10), Coord(2)) == interval(2, 8));
    CHECK(shrink(interval(0, 3), Coord(2)).empty());
}

TEST_CASE("shrink and fatten agree with ball containment on a lattice") {
    Region l(2, {box2(0, 0, 10, 4), box2(0, 0, 4, 10), box2(6, -3, 9, 1)});
    // L = 1.25 keeps every eroded piece full-dimensional; shrink drops
    // lower-dimensional leftovers.
    const Coord L = c(1.25);
    Region in = shrink(l, L), out = fatten(l, L);
    for (int i = -24; i <= 48; ++i)
        for (int j = -24; j <= 48; ++j) {
            QVec x{Coord::ratio(i, 4), Coord::ratio(j, 4)};
            Box ball = Box::ball(x, L);
            CHECK(in.contains(x) == l.contains(ball));
            bool near = false;
            for (const Box& b : l.boxes()) near = near || distance(b, x) <= L;
            CHECK(out.contains(x) == near);
        }
}

TEST_CASE("region boolean operations") {
    Region a = interval(0, 4), b = interval(3, 8);
    CHECK(unite(a, b) == interval(0, 8));
    CHECK(intersect(a, b) == interval(3, 4));
    CHECK(subtract(a, b) == interval(0, 3));
    CHECK(intersect(interval(0, 1), interval(2, 3)).empty());
    // Canonical form: the same set built two ways compares equal.
    Region p(2, {box2(0, 0, 2, 1), box2(0, 1, 2, 2)});
    Region q(2, {box2(0, 0, 1, 2), box2(1, 0, 2, 2)});
    CHECK(p == q);
}

TEST_CASE("voronoi assignment and lacunarity") {
    PointSet cs{1, {QVec{c(0)}, QVec{c(10)}}, Coord(4), true};
    CHECK(voronoi_assign(cs, QVec{c(3)}) == QVec{c(0)});
    CHECK(voronoi_assign(cs, QVec{c(5)}) == QVec{c(0)});
    CHECK(voronoi_assign(cs, QVec{c(7)}) == QVec{c(10)});
    PointSet one{1, {QVec{c(2.5)}}, Coord(1), true};
    CHECK(voronoi_assign(one, QVec{c(-300)}) == QVec{c(2.5)});
    CHECK(check_lacunary(cs, Coord(4)));
    CHECK_FALSE(check_lacunary(PointSet{1, {QVec{c(0)}, QVec{c(3)}}, Coord(4), false}, Coord(4)));
    CHECK(check_lacunary(one, Coord(1000)));
}

TEST_CASE("diameter and set distance") {
    CHECK(diameter(Region(box2(0, 0, 1, 1))) == Coord(1));
    CHECK(set_distance(interval(0, 1), interval(3, 4)) == Coord(2));
    Region a(box2(0, 0, 3, 3));
    CHECK(set_distance(a, a) == Coord(0));
}

TEST_CASE("integer points") {
    Region l(2, {box2(0, 0, 10, 4), box2(0, 0, 4, 10)});
    std::uint64_t n = 0;
    for_each_integer_point(l, [&](const IVec&) { ++n; });
    // 11 x 5 + 5 x 11 - 5 x 5
    CHECK(n == 85);
    CHECK(count_integer_points(l) == 85);
    CHECK(count_integer_points(interval(0.5, 3.5)) == 3);
}
