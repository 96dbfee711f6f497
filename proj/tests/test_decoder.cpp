#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bipnet/decoder.hpp"
#include "bipnet/synth.hpp"
#include "oracles.hpp"

using namespace bipnet;

namespace {

RayCluster make_cluster(Point2 center, std::vector<double> dists) {
  RayCluster cl;
  cl.center = center;
  cl.distances = std::move(dists);
  return cl;
}

PredictionMaps gt_maps_for(const std::vector<Polygon>& contours, int h, int w) {
  GtMapsResult res = generate_gt_maps(contours, h, w, 8, 0.4);
  REQUIRE(res.warnings.empty());
  return to_prediction_maps(std::move(res.maps));
}

}  // namespace

TEST_CASE("binarize_components basics") {
  CHECK(binarize_components(Raster(10, 10, 0.0), 0.5, 1).empty());

  Raster m(20, 40, 0.0);
  for (int r = 2; r < 18; ++r) {
    for (int c = 2; c < 15; ++c) m(r, c) = 0.9;
    for (int c = 22; c < 38; ++c) m(r, c) = 0.8;
  }
  const auto comps = binarize_components(m, 0.5, 16);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].foreground_count() == 16 * 13);
  CHECK(comps[1].foreground_count() == 16 * 16);

  Raster tiny(10, 10, 0.0);
  for (int c = 0; c < 10; ++c) tiny(4, c) = 1.0;  // 10 px < min_area 16
  CHECK(binarize_components(tiny, 0.5, 16).empty());
  CHECK(binarize_components(tiny, 0.5, 10).size() == 1);
}

TEST_CASE("read_cluster reads the pixel containing the center") {
  std::vector<Raster> maps;
  for (int i = 0; i < 8; ++i) maps.push_back(Raster(10, 10, 5.0));
  const RayCluster constant = read_cluster({4.5, 4.5}, maps);
  for (double d : constant.distances) CHECK(d == doctest::Approx(5.0));

  for (int i = 0; i < 8; ++i) maps[i](2, 7) = i + 1.0;
  const RayCluster direct = read_cluster({7.5, 2.5}, maps);
  for (int i = 0; i < 8; ++i) CHECK(direct.distances[i] == doctest::Approx(i + 1.0));

  for (int i = 0; i < 8; ++i) maps[i](0, 0) = 0.0;
  const RayCluster clamped = read_cluster({0.5, 0.5}, maps);
  for (double d : clamped.distances) CHECK(d == doctest::Approx(0.5));  // floor clamp

  CHECK_THROWS_AS(read_cluster({50, 50}, maps), Error);
}

TEST_CASE("read_cluster against encoder ground truth") {
  const Polygon rect = oracle::rect_polygon(5, 5, 85, 25);
  const PredictionMaps maps = gt_maps_for({rect}, 40, 100);
  const auto centers = sample_centers(maps.shrink_prob, 5);
  for (const auto& center : centers) {
    const RayCluster read = read_cluster(center, maps.distance_maps);
    const RayCluster direct = cast_cluster(center, rect, 8);
    for (int i = 0; i < 8; ++i) {
      CHECK(std::abs(read.distances[i] - direct.distances[i]) <= 0.71);
    }
  }
}

TEST_CASE("piecewise_contour shapes") {
  const RayCluster even = make_cluster({10, 10}, std::vector<double>(8, 4.0));
  const Polygon octagon = piecewise_contour(even);
  REQUIRE(octagon.size() == 8);
  // Regular octagon of circumradius 4: (1/2) n R^2 sin(2 pi / n).
  const double want = 0.5 * 8 * 4.0 * 4.0 * std::sin(2.0 * M_PI / 8);
  CHECK(polygon_area(octagon) == doctest::Approx(want));
  for (const auto& v : octagon.vertices()) {
    CHECK(norm(v - Point2{10, 10}) == doctest::Approx(4.0));
  }

  // Square-cast cluster: vertices alternate between side midpoints and corners.
  const RayCluster sq = cast_cluster({0, 0}, oracle::rect_polygon(-1, -1, 1, 1), 8);
  const Polygon oct2 = piecewise_contour(sq);
  for (int i = 0; i < 8; ++i) {
    const double r = norm(oct2[i] - Point2{0, 0});
    CHECK(r == doctest::Approx(i % 2 == 0 ? 1.0 : std::sqrt(2.0)));
  }
}

TEST_CASE("piecewise area never exceeds a convex source") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> rad(10.0, 30.0);
  for (int it = 0; it < 25; ++it) {
    // Convex contour: vertices on a circle.
    const Polygon convex = oracle::regular_ngon(50, 50, rad(rng), 16);
    const RayCluster cl = cast_cluster({50, 50}, convex, 8);
    CHECK(polygon_area(piecewise_contour(cl)) <= polygon_area(convex) + 1e-9);
  }
}

TEST_CASE("piecewise_contour is simple on random clusters") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> rad(0.5, 20.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> d(8);
    for (auto& x : d) x = rad(rng);
    const Polygon p = piecewise_contour(make_cluster({30, 30}, d));
    CHECK_FALSE(oracle::has_self_intersection(p.vertices()));
  }
}

TEST_CASE("select_interval_points on two octagons a diameter apart") {
  const double R = 6.0;
  std::vector<double> d(8, R);
  const RayCluster a = make_cluster({0, 0}, d);
  const RayCluster b = make_cluster({2 * R, 0}, d);
  const auto pts = select_interval_points(a, b);

  // Enumerated expectation: projections t = cos(theta)/2 from a and
  // 1 + cos(theta)/2 from b; the forward half of a and the rear half of b
  // (five endpoints each, the axis-normal rays exactly at t = 0 and t = 1).
  std::vector<Point2> want;
  for (int i = 0; i < 8; ++i) {
    const double t = std::cos(ray_angle(i, 8)) / 2.0;
    if (t >= -1e-9 && t <= 1.0 + 1e-9) want.push_back(a.endpoint(i));
  }
  for (int i = 0; i < 8; ++i) {
    const double t = 1.0 + std::cos(ray_angle(i, 8)) / 2.0;
    if (t >= -1e-9 && t <= 1.0 + 1e-9) want.push_back(b.endpoint(i));
  }
  REQUIRE(want.size() == 10);
  REQUIRE(pts.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(norm(pts[i] - want[i]) <= 1e-12);
  // Point-symmetric about the midpoint (R, 0): every selected point has its
  // reflection in the set.
  for (const auto& p : pts) {
    const Point2 mirror{2 * R - p.x, -p.y};
    bool found = false;
    for (const auto& q : pts) found = found || norm(q - mirror) <= 1e-9;
    CHECK(found);
  }
}

TEST_CASE("select_interval_points on a straight bar picks the points between the centers") {
  const Polygon bar = oracle::rect_polygon(0, 0, 60, 20);
  const RayCluster a = cast_cluster({20, 10}, bar, 8);
  const RayCluster b = cast_cluster({40, 10}, bar, 8);
  const auto pts = select_interval_points(a, b);
  for (const auto& p : pts) {
    CHECK(p.x >= 20.0 - 1e-9);
    CHECK(p.x <= 40.0 + 1e-9);
  }
  // Top and bottom contour points between the centers are all selected.
  int top = 0, bottom = 0;
  for (const auto& p : pts) {
    top += p.y == doctest::Approx(20.0);
    bottom += p.y == doctest::Approx(0.0);
  }
  CHECK(top >= 2);
  CHECK(bottom >= 2);
}

TEST_CASE("select_interval_points falls back to all endpoints when too few qualify") {
  // Far-apart tiny clusters: only two endpoints project into [0,1].
  const RayCluster a = make_cluster({0, 0}, std::vector<double>(8, 0.5));
  const RayCluster b = make_cluster({100, 0}, std::vector<double>(8, 0.5));
  const auto pts = select_interval_points(a, b);
  CHECK(pts.size() >= 3);

  CHECK_THROWS_AS(select_interval_points(a, make_cluster({0, 1e-9}, a.distances)), Error);
}

TEST_CASE("cc_connect restores scrambled convex rings") {
  const std::vector<Point2> square = {{4, 0}, {0, 0}, {4, 4}, {0, 4}};
  const Polygon sq = cc_connect(square);
  REQUIRE(sq.size() == 4);
  CHECK(polygon_area(sq) == doctest::Approx(16.0));
  CHECK_FALSE(oracle::has_self_intersection(sq.vertices()));

  std::mt19937 rng(13);
  const Polygon gon = oracle::regular_ngon(10, 10, 5, 8);
  std::vector<Point2> shuffled(gon.vertices());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const Polygon back = cc_connect(shuffled);
  CHECK(polygon_area(back) == doctest::Approx(polygon_area(gon)));
}

TEST_CASE("cc_connect is invariant under input permutation") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> coord(0.0, 40.0);
  for (int it = 0; it < 20; ++it) {
    std::vector<Point2> pts(9);
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    const Polygon first = cc_connect(pts);
    std::shuffle(pts.begin(), pts.end(), rng);
    const Polygon second = cc_connect(pts);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      CHECK(first[i] == second[i]);
    }
  }
}

TEST_CASE("cc_connect degenerate inputs") {
  CHECK_THROWS_AS(cc_connect({{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(cc_connect({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), Error);
  CHECK_THROWS_AS(cc_connect({{0, 0}, {0, 0}, {0, 0}, {1, 1}}), Error);
}

TEST_CASE("cc_connect bridges the straight-bar interval set simply") {
  const Polygon bar = oracle::rect_polygon(0, 0, 60, 20);
  const RayCluster a = cast_cluster({20, 10}, bar, 8);
  const RayCluster b = cast_cluster({40, 10}, bar, 8);
  const Polygon region = cc_connect(select_interval_points(a, b));
  CHECK_FALSE(oracle::has_self_intersection(region.vertices()));
  CHECK(polygon_area(region) > 0.0);
}

TEST_CASE("merge_regions identity on a single octagon") {
  const Polygon oct = piecewise_contour(make_cluster({20, 20}, std::vector<double>(8, 10.0)));
  const Polygon merged = merge_regions({oct}, {}, 40, 40);
  CHECK(mask_iou(rasterize(oct, 40, 40), rasterize(merged, 40, 40)) >= 0.95);
}

TEST_CASE("merge_regions joins disjoint octagons through a bridge") {
  const Polygon a = piecewise_contour(make_cluster({12, 20}, std::vector<double>(8, 6.0)));
  const Polygon b = piecewise_contour(make_cluster({48, 20}, std::vector<double>(8, 6.0)));
  const Polygon bridge = oracle::rect_polygon(10, 17, 50, 23);
  const Polygon merged = merge_regions({a, b}, {bridge}, 40, 60);
  const Raster mask = rasterize(merged, 40, 60);
  for (const Polygon* part : {&a, &b, &bridge}) {
    const Raster pm = rasterize(*part, 40, 60);
    for (int r = 0; r < 40; ++r) {
      for (int c = 0; c < 60; ++c) {
        if (pm(r, c) >= 0.5) CHECK(mask(r, c) >= 0.5);
      }
    }
  }
}

TEST_CASE("merge_regions union dominates every input raster") {
  std::mt19937 rng(29);
  for (int it = 0; it < 100; ++it) {
    std::uniform_real_distribution<double> rad(2.0, 12.0);
    std::uniform_real_distribution<double> pos(15.0, 45.0);
    std::vector<Polygon> parts;
    const int count = 1 + it % 4;
    for (int k = 0; k < count; ++k) {
      std::vector<double> d(8);
      for (auto& x : d) x = rad(rng);
      parts.push_back(piecewise_contour(make_cluster({pos(rng), pos(rng)}, d)));
    }
    const Polygon merged = merge_regions(parts, {}, 60, 60);
    const Raster mask = rasterize(merged, 60, 60);
    long long max_part = 0;
    for (const auto& part : parts) {
      max_part = std::max(max_part, oracle::count_fg(rasterize(part, 60, 60)));
    }
    CHECK(oracle::count_fg(mask) >= max_part);
  }
}

TEST_CASE("merge_regions with nothing on the canvas") {
  CHECK_THROWS_AS(merge_regions({}, {}, 10, 10), Error);
  const Polygon off = oracle::rect_polygon(100, 100, 110, 110);
  CHECK_THROWS_AS(merge_regions({off}, {}, 10, 10), Error);
}

TEST_CASE("decode round trip on the 100x20 rectangle") {
  const Polygon rect = oracle::rect_polygon(8, 8, 108, 28);
  const PredictionMaps maps = gt_maps_for({rect}, 40, 120);
  const DetectionResult det = decode(maps);
  REQUIRE(det.polygons.size() == 1);
  CHECK(det.scores[0] == doctest::Approx(1.0));
  const double iou = mask_iou(rasterize(rect, 40, 120), rasterize(det.polygons[0], 40, 120));
  CHECK(iou >= 0.9);
}

TEST_CASE("decode of empty maps") {
  PredictionMaps maps;
  maps.shrink_prob = Raster(32, 32, 0.0);
  maps.distance_maps.assign(8, Raster(32, 32, 0.0));
  const DetectionResult det = decode(maps);
  CHECK(det.polygons.empty());
  CHECK(det.dropped.empty());
}

TEST_CASE("decode round trip on a synthetic sine ribbon") {
  SynthParams params;
  params.seed = 77;
  params.count = 1;
  const auto records = synth_generate(params);
  REQUIRE(records.size() == 1);
  const Polygon& ribbon = records[0].polygon;
  const PredictionMaps maps = gt_maps_for({ribbon}, params.canvas_height, params.canvas_width);
  const DetectionResult det = decode(maps);
  REQUIRE(det.polygons.size() == 1);
  const Raster want = rasterize(ribbon, params.canvas_height, params.canvas_width);
  const Raster got = rasterize(det.polygons[0], params.canvas_height, params.canvas_width);
  CHECK(mask_iou(want, got) >= 0.75);
}

TEST_CASE("decode with n=1 returns the lone piecewise octagon") {
  const Polygon sq = oracle::rect_polygon(10, 10, 40, 40);
  const PredictionMaps maps = gt_maps_for({sq}, 60, 60);
  DecodeConfig cfg;
  cfg.n = 1;
  cfg.trace = true;
  const DetectionResult det = decode(maps, cfg);
  REQUIRE(det.polygons.size() == 1);
  REQUIRE(det.traces.size() == 1);
  CHECK(det.traces[0].clusters.size() == 1);
  CHECK(det.traces[0].intervals.empty());
  const Raster octagon = rasterize(det.traces[0].piecewise[0], 60, 60);
  const Raster merged = rasterize(det.polygons[0], 60, 60);
  CHECK(mask_iou(octagon, merged) >= 0.95);
}

TEST_CASE("decode keeps every piecewise raster inside the merged mask") {
  std::mt19937 rng(57);
  int checked = 0;
  for (int it = 0; it < 20; ++it) {
    const Polygon poly = oracle::random_star_polygon(rng, 60, 60, 18, 40, 10);
    GtMapsResult gt = generate_gt_maps({poly}, 120, 120, 8, 0.4);
    if (!gt.warnings.empty()) continue;
    DecodeConfig cfg;
    cfg.trace = true;
    const DetectionResult det = decode(to_prediction_maps(std::move(gt.maps)), cfg);
    if (det.polygons.empty()) continue;
    ++checked;
    const Raster merged = rasterize(det.polygons[0], 120, 120);
    for (const auto& piece : det.traces[0].piecewise) {
      const Raster pm = rasterize(piece, 120, 120);
      for (int r = 0; r < 120; ++r) {
        for (int c = 0; c < 120; ++c) {
          if (pm(r, c) >= 0.5) {
            REQUIRE(merged(r, c) >= 0.5);
          }
        }
      }
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("decode is deterministic") {
  const Polygon rect = oracle::rect_polygon(8, 8, 88, 28);
  const PredictionMaps maps = gt_maps_for({rect}, 40, 100);
  const DetectionResult a = decode(maps);
  const DetectionResult b = decode(maps);
  REQUIRE(a.polygons.size() == b.polygons.size());
  for (std::size_t i = 0; i < a.polygons.size(); ++i) {
    REQUIRE(a.polygons[i].size() == b.polygons[i].size());
    for (std::size_t k = 0; k < a.polygons[i].size(); ++k) {
      CHECK(a.polygons[i][k] == b.polygons[i][k]);
    }
  }
}
