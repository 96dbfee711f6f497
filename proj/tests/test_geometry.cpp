#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bipnet/geometry.hpp"
#include "bipnet/raster.hpp"
#include "oracles.hpp"

using namespace bipnet;

TEST_CASE("polygon_area basics") {
  CHECK(polygon_area(oracle::rect_polygon(0, 0, 1, 1)) == doctest::Approx(1.0));
  CHECK(polygon_area(Polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}})) == doctest::Approx(1.0));
  CHECK(polygon_area(Polygon({{0, 0}, {4, 0}, {0, 3}})) == doctest::Approx(6.0));
}

TEST_CASE("polygon_area invariant under reversal and rotation of the vertex list") {
  std::mt19937 rng(7);
  for (int it = 0; it < 20; ++it) {
    const Polygon poly = oracle::random_star_polygon(rng, 50, 50, 10, 30, 9);
    const double base = polygon_area(poly);

    std::vector<Point2> rev(poly.vertices().rbegin(), poly.vertices().rend());
    CHECK(polygon_area(Polygon(rev)) == doctest::Approx(base));

    std::vector<Point2> rot(poly.vertices().begin() + 3, poly.vertices().end());
    rot.insert(rot.end(), poly.vertices().begin(), poly.vertices().begin() + 3);
    CHECK(polygon_area(Polygon(rot)) == doctest::Approx(base));
  }
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), Error);
  CHECK_THROWS_AS(Polygon({{0, 0}, {0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {2, 2}}), Error);  // zero area
  const double nan = std::nan("");
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, nan}, {1, 1}}), Error);
}

TEST_CASE("point_in_polygon conventions") {
  const Polygon sq = oracle::rect_polygon(0, 0, 1, 1);
  CHECK(point_in_polygon({0.5, 0.5}, sq));
  CHECK_FALSE(point_in_polygon({2, 2}, sq));
  CHECK(point_in_polygon({1.0, 0.5}, sq));  // on the right edge
  CHECK(point_in_polygon({0.0, 0.0}, sq));  // on a vertex
}

TEST_CASE("ray_polygon_first_hit on the centered square") {
  const Polygon sq = oracle::rect_polygon(-1, -1, 1, 1);
  CHECK(ray_polygon_first_hit({0, 0}, 0.0, sq) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ray_polygon_first_hit({0, 0}, M_PI / 4, sq) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ray_polygon_first_hit on a 64-gon circle") {
  const Polygon circle = oracle::regular_ngon(0, 0, 1.0, 64);
  for (int i = 0; i < 8; ++i) {
    const double d = ray_polygon_first_hit({0, 0}, i * 2.0 * M_PI / 8, circle);
    CHECK(d == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("ray origin outside the polygon") {
  const Polygon sq = oracle::rect_polygon(0, 0, 1, 1);
  CHECK_THROWS_AS(ray_polygon_first_hit({5, 5}, 0.0, sq), Error);
}

TEST_CASE("ray endpoints land on the boundary") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int it = 0; it < 50; ++it) {
    const Polygon poly = oracle::random_star_polygon(rng, 40, 40, 8, 25, 11);
    for (int k = 0; k < 8; ++k) {
      const double a = angle(rng);
      const double t = ray_polygon_first_hit({40, 40}, a, poly);
      const Point2 hit{40 + t * std::cos(a), 40 + t * std::sin(a)};
      CHECK(distance_to_boundary(hit, poly) <= 1e-9);
    }
  }
}

TEST_CASE("shrink of the 100x20 rectangle at ratio 0.4 is the 86x6 rectangle") {
  // d = 2000 * (1 - 0.16) / 240 = 7.
  const Polygon shrunk = shrink_polygon(oracle::rect_polygon(0, 0, 100, 20), 0.4);
  REQUIRE(shrunk.size() == 4);
  const Bounds b = shrunk.bounds();
  CHECK(b.min_x == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(b.max_x == doctest::Approx(93.0).epsilon(1e-12));
  CHECK(b.min_y == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(b.max_y == doctest::Approx(13.0).epsilon(1e-12));
}

TEST_CASE("shrink ratio 1 is the identity") {
  const Polygon poly = oracle::rect_polygon(0, 0, 10, 10);
  const Polygon same = shrink_polygon(poly, 1.0);
  REQUIRE(same.size() == poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    CHECK(norm(same[i] - poly[i]) <= 1e-12);
  }
}

TEST_CASE("shrink of the 10x10 square checked by 10x-scale rasterization") {
  const Polygon shrunk = shrink_polygon(oracle::rect_polygon(0, 0, 10, 10), 0.4);
  // d = 100 * 0.84 / 40 = 2.1, so the expected region is [2.1, 7.9]^2.
  std::vector<Point2> scaled;
  for (const auto& p : shrunk.vertices()) scaled.push_back({10 * p.x, 10 * p.y});
  const long long got = oracle::count_fg(rasterize(Polygon(scaled), 100, 100));
  const long long want = oracle::count_fg(rasterize(oracle::rect_polygon(21, 21, 79, 79), 100, 100));
  CHECK(got == want);
  CHECK(polygon_area(shrunk) == doctest::Approx(33.64).epsilon(1e-9));
}

TEST_CASE("shrink reduces area and stays inside") {
  std::mt19937 rng(23);
  for (int it = 0; it < 30; ++it) {
    const Polygon poly = oracle::random_star_polygon(rng, 60, 60, 15, 40, 10);
    Polygon shrunk = shrink_polygon_fallback(poly, 0.4);
    CHECK(polygon_area(shrunk) < polygon_area(poly));
    for (const auto& p : shrunk.vertices()) {
      CHECK(point_in_polygon(p, poly));
    }
    CHECK_FALSE(oracle::has_self_intersection(shrunk.vertices()));
  }
}

TEST_CASE("degenerate shrink throws, fallback recovers") {
  // Two blocks joined by a neck of half-width 1; the nominal offset exceeds
  // the neck and the displaced sides cross.
  const Polygon dumbbell({{0, 0}, {20, 0}, {20, 9}, {40, 9}, {40, 0}, {60, 0},
                          {60, 20}, {40, 20}, {40, 11}, {20, 11}, {20, 20}, {0, 20}});
  CHECK_THROWS_AS(shrink_polygon(dumbbell, 0.4), Error);
  const Polygon rescued = shrink_polygon_fallback(dumbbell, 0.4);
  CHECK(polygon_area(rescued) > 0.0);
  CHECK(polygon_area(rescued) < polygon_area(dumbbell));
  for (const auto& p : rescued.vertices()) CHECK(point_in_polygon(p, dumbbell));
}

TEST_CASE("is_simple_polygon flags a self-crossing quad") {
  CHECK(is_simple_polygon(oracle::rect_polygon(0, 0, 5, 5)));
  std::vector<Point2> bow = {{0, 0}, {4, 4}, {4, 0}, {0, 3}};
  CHECK_FALSE(is_simple_polygon(Polygon(bow)));
}
