#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bipnet/losses.hpp"

using namespace bipnet;

namespace {

Raster random_unit_raster(std::mt19937& rng, int h, int w) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Raster out(h, w, 0.0);
  for (auto& v : out.data()) v = u(rng);
  return out;
}

Raster random_binary_raster(std::mt19937& rng, int h, int w) {
  std::bernoulli_distribution b(0.4);
  Raster out(h, w, 0.0);
  for (auto& v : out.data()) v = b(rng) ? 1.0 : 0.0;
  return out;
}

// Central differences straight from the loss values; independent of the
// library's own finite_diff_check.
template <typename Loss, typename Values>
double fd_max_rel_error(Loss&& loss_of, Values& values, const std::vector<double>& analytic,
                        double eps) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + eps;
    const double up = loss_of();
    values[i] = saved - eps;
    const double down = loss_of();
    values[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(std::abs(numeric), 1e-12));
  }
  return worst;
}

}  // namespace

TEST_CASE("dice loss identities") {
  std::mt19937 rng(3);
  Raster g = random_binary_raster(rng, 10, 10);
  while (g.foreground_count() != 100) {
    for (auto& v : g.data()) v = 1.0;  // force exactly 100 ones
  }
  const DiceLoss identical = dice_loss(g, g);
  CHECK(identical.loss == 0.0);  // 1 - 201/201, exactly

  Raster zeros(10, 10, 0.0);
  Raster g99(10, 10, 0.0);
  for (int i = 0; i < 99; ++i) g99.data()[i] = 1.0;
  CHECK(dice_loss(zeros, g99).loss == doctest::Approx(0.99).epsilon(1e-12));

  CHECK_THROWS_AS(dice_loss(Raster(4, 4, 0.0), Raster(5, 5, 0.0)), Error);
}

TEST_CASE("dice loss stays in [0,1) and vanishes only at the ground truth") {
  std::mt19937 rng(11);
  for (int it = 0; it < 20; ++it) {
    const Raster g = random_binary_raster(rng, 8, 8);
    const Raster p = random_unit_raster(rng, 8, 8);
    const double loss = dice_loss(p, g).loss;
    CHECK(loss >= 0.0);
    CHECK(loss < 1.0);
    if (p.data() != g.data()) CHECK(loss > 0.0);
    CHECK(dice_loss(g, g).loss == 0.0);
  }
}

TEST_CASE("dice gradient matches central finite differences") {
  std::mt19937 rng(7);
  for (int it = 0; it < 5; ++it) {
    const Raster g = random_binary_raster(rng, 16, 16);
    Raster p = random_unit_raster(rng, 16, 16);
    const DiceLoss base = dice_loss(p, g);
    const double err = fd_max_rel_error([&] { return dice_loss(p, g).loss; }, p.data(),
                                        base.grad.data(), 1e-6);
    CHECK(err <= 1e-5);
  }
}

TEST_CASE("ray loss identities") {
  RayBatch d(1, 8, 3.0);
  CHECK(ray_loss(d, d).loss == 0.0);

  RayBatch twice(1, 8, 6.0);
  CHECK(ray_loss(twice, d).loss == doctest::Approx(8.0 * std::log(2.0)).epsilon(1e-12));

  RayBatch bad(1, 8, 0.0);
  CHECK_THROWS_AS(ray_loss(bad, d), Error);
  CHECK_THROWS_AS(ray_loss(d, RayBatch(2, 8, 3.0)), Error);
}

TEST_CASE("ray loss symmetry and scale invariance") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (int it = 0; it < 20; ++it) {
    RayBatch a(4, 8), b(4, 8);
    for (auto& v : a.values) v = u(rng);
    for (auto& v : b.values) v = u(rng);
    const double ab = ray_loss(a, b).loss;
    CHECK(ab == doctest::Approx(ray_loss(b, a).loss).epsilon(1e-12));
    CHECK(ab >= 0.0);

    RayBatch a3 = a, b3 = b;
    for (auto& v : a3.values) v *= 3.0;
    for (auto& v : b3.values) v *= 3.0;
    CHECK(ray_loss(a3, b3).loss == doctest::Approx(ab).epsilon(1e-9));
  }
}

TEST_CASE("ray gradient matches central finite differences away from the kink") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.5, 20.0);
  for (int it = 0; it < 10; ++it) {
    RayBatch p(3, 8), g(3, 8);
    for (auto& v : g.values) v = u(rng);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      p.values[i] = g.values[i] + (i % 2 ? 1.0 : -0.4) * (0.1 + u(rng) * 0.1);
    }
    const RayLoss base = ray_loss(p, g);
    const double err = fd_max_rel_error([&] { return ray_loss(p, g).loss; }, p.values,
                                        base.grad.values, 1e-6);
    CHECK(err <= 1e-5);
  }
}

TEST_CASE("total loss arithmetic and default weight") {
  CHECK(total_loss(0.2, 4.0) == doctest::Approx(1.2));
  CHECK(total_loss(0.0, 0.0) == 0.0);
  CHECK(total_loss(0.3, 2.0, LossConfig{0.25}) == doctest::Approx(total_loss(0.3, 2.0)));
  CHECK(total_loss(0.3, 2.0, LossConfig{0.5}) == doctest::Approx(1.3));
  CHECK_THROWS_AS(total_loss(0.1, 0.1, LossConfig{0.0}), Error);
}

TEST_CASE("finite_diff_check on the dice loss") {
  std::mt19937 rng(19);
  const Raster g = random_binary_raster(rng, 8, 8);
  const Raster p = random_unit_raster(rng, 8, 8);
  const FiniteDiffReport report = finite_diff_check(p, g, 1e-6);
  CHECK(report.max_rel_error <= 1e-5);
  CHECK(report.checked == 64);
  CHECK(report.excluded == 0);
}

TEST_CASE("finite_diff_check on the ray loss reports kink exclusions") {
  RayBatch g(2, 8, 4.0);
  RayBatch p = g;
  for (std::size_t i = 0; i < p.values.size(); i += 2) p.values[i] = 6.5;  // half off the kink
  const FiniteDiffReport report = finite_diff_check(p, g, 1e-6);
  CHECK(report.max_rel_error <= 1e-5);
  CHECK(report.excluded == 8);
  CHECK(report.checked == 8);

  CHECK_THROWS_AS(finite_diff_check(p, g, 1e-2), Error);
  CHECK_THROWS_AS(finite_diff_check(p, g, 1e-10), Error);
}
