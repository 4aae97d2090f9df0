#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "gfdwa/gpdf.hpp"
#include "support.hpp"

using namespace gfdwa;
using doctest::Approx;

namespace {

KernelParams noise_free() {
  KernelParams p;
  p.noise_sigma = 0.0;
  return p;
}

std::vector<Vec2> segment_points() {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 40; ++i) pts.emplace_back(0.1 * i, 0.0);
  return pts;
}

}  // namespace

TEST_CASE("kernel and its inverse") {
  const KernelParams p;
  CHECK(kernel_eval(0.0, p) == 1.0);
  CHECK(kernel_eval(0.2, p) == Approx(0.3678794).epsilon(1e-7));
  CHECK(kernel_eval(0.4, p) == Approx(0.1353353).epsilon(1e-7));

  CHECK(inverse_map(1.0, p) == 0.0);
  CHECK(inverse_map(std::exp(-1.0), p) == Approx(0.2).epsilon(1e-12));
  CHECK(inverse_map(1.3, p) == 0.0);
  CHECK(inverse_map(0.0, p) == Approx(-0.2 * std::log(kLatentFloor)));

  for (double d = 0.0; d <= 0.6; d += 0.01) {
    CHECK(std::abs(inverse_map(kernel_eval(d, p), p) - d) < 1e-9);
  }
}

TEST_CASE("fit weights") {
  const std::vector<Vec2> one = {{0.0, 0.0}};
  CHECK(GpField::fit(one, noise_free()).alpha()[0] == Approx(1.0).epsilon(1e-15));

  KernelParams noisy;
  noisy.noise_sigma = 0.1;
  CHECK(GpField::fit(one, noisy).alpha()[0] == Approx(1.0 / 1.01).epsilon(1e-12));

  // direct inverse of [[1, c], [c, 1]] applied to the ones vector
  const std::vector<Vec2> two = {{0.0, 0.0}, {0.2, 0.0}};
  const double c = std::exp(-1.0);
  const double det = 1.0 - c * c;
  const double expected = (1.0 - c) / det;
  const auto f = GpField::fit(two, noise_free());
  CHECK(f.alpha()[0] == Approx(expected).epsilon(1e-12));
  CHECK(f.alpha()[1] == Approx(expected).epsilon(1e-12));
  CHECK(expected == Approx(0.731).epsilon(1e-3));
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(GpField::fit(std::vector<Vec2>{}, KernelParams{}), std::invalid_argument);
  const std::vector<Vec2> dup = {{0.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(GpField::fit(dup, noise_free()), SingularKernelMatrix);
  KernelParams bad;
  bad.length_scale = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("single point field is exact") {
  const std::vector<Vec2> one = {{0.0, 0.0}};
  const auto f = GpField::fit(one, noise_free());
  CHECK(f.distance({0.3, 0.0}) == Approx(0.3).epsilon(1e-12));
  CHECK(f.distance({0.0, 0.0}) == 0.0);

  const Vec2 gx = f.gradient({0.3, 0.0});
  CHECK(gx.x() == Approx(1.0));
  CHECK(gx.y() == Approx(0.0));
  const Vec2 gy = f.gradient({0.0, 0.3});
  CHECK(gy.x() == Approx(0.0));
  CHECK(gy.y() == Approx(1.0));

  CHECK(f.variance({0.0, 0.0}) == Approx(0.0).epsilon(1e-12));
  CHECK(f.variance({0.2, 0.0}) == Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  CHECK(f.variance({1e6, 0.0}) == 1.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::uniform_real_distribution<double> a(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 200; ++i) {
    const double d = r(rng);
    const double t = a(rng);
    CHECK(std::abs(f.distance({d * std::cos(t), d * std::sin(t)}) - d) < 1e-9);
  }
}

TEST_CASE("dense segment underestimates far from the line") {
  const auto pts = segment_points();
  const auto f = GpField::fit(pts, KernelParams{});
  const double d = f.distance({2.0, 0.5});
  // Regression bound. The sum of many nearby kernels inflates the latent
  // mean, so the distance comes out about a third short at 0.5 m.
  CHECK(d == Approx(0.3418879628793584).epsilon(1e-9));
  CHECK(std::abs(d - 0.5) <= 0.1582);
  CHECK(d < 0.5);
  // close to the line the field is accurate
  CHECK(f.distance({2.0, 0.05}) == Approx(0.05).epsilon(0.2));
}

TEST_CASE("analytic gradient matches finite differences") {
  const auto pts = segment_points();
  const auto f = GpField::fit(pts, KernelParams{});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(-1.0, 5.0);
  std::uniform_real_distribution<double> uy(-1.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const Vec2 p(ux(rng), uy(rng));
    if (testing::brute_force_distance(pts, p) < 1e-3 || f.distance(p) <= 0.0) continue;
    const Vec2 analytic = f.raw_gradient(p);
    const Vec2 numeric = testing::central_difference(f, p, 1e-5);
    CHECK((analytic - numeric).norm() / analytic.norm() < 1e-3);
    const Vec2 unit = f.gradient(p);
    CHECK(unit.norm() == Approx(1.0).epsilon(1e-6));
    ++checked;
  }
}

TEST_CASE("field properties") {
  const std::vector<Vec2> pts = {{-1.0, 0.0}, {-0.5, 0.3}, {0.0, 0.5}, {0.5, 0.3}, {1.0, 0.0}};
  const auto f = GpField::fit(pts, KernelParams{});
  CHECK(f.fit_residual() < 1e-8);

  // the set is symmetric about the y axis
  for (double x = 0.0; x < 2.0; x += 0.13) {
    for (double y = -1.0; y < 1.5; y += 0.17) {
      CHECK(std::abs(f.distance({x, y}) - f.distance({-x, y})) < 1e-9);
      CHECK(f.distance({x, y}) >= 0.0);
    }
  }
  // beyond the clamp the gradient degenerates to zero
  CHECK(f.gradient({100.0, 0.0}).isZero(0.0));
  CHECK(f.distance({100.0, 0.0}) == Approx(-0.2 * std::log(kLatentFloor)));
}

TEST_CASE("query bundles distance and gradient") {
  const auto pts = segment_points();
  const auto f = GpField::fit(pts, KernelParams{});
  const Vec2 p(1.3, 0.4);
  const FieldQuery q = f.query(p);
  CHECK(q.distance == Approx(f.distance(p)).epsilon(1e-12));
  CHECK((q.gradient - f.gradient(p)).norm() < 1e-12);
}

TEST_CASE("batch queries agree across execution modes") {
  const auto pts = segment_points();
  const auto f = GpField::fit(pts, KernelParams{});
  std::vector<Vec2> queries;
  for (int i = 0; i < 500; ++i) queries.emplace_back(-1.0 + 0.013 * i, std::sin(0.1 * i));
  const auto serial = query_batch(f, queries, Execution::Serial);
  const auto parallel = query_batch(f, queries, Execution::Parallel);
  REQUIRE(serial.size() == queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    CHECK(serial[i].distance == parallel[i].distance);
    CHECK(serial[i].gradient == parallel[i].gradient);
    CHECK(serial[i].distance == f.query(queries[i]).distance);
  }
}

TEST_CASE("compose takes the minimum") {
  const std::vector<Vec2> a = {{0.0, 0.0}};
  const std::vector<Vec2> b = {{2.0, 0.0}};
  const auto fa = GpField::fit(a, noise_free());
  const auto fb = GpField::fit(b, noise_free());

  const std::vector<GpField> single = {fa};
  const Vec2 p(0.3, 0.1);
  CHECK(compose(single, p).distance == fa.distance(p));

  const std::vector<GpField> both = {fa, fb};
  const FieldQuery near_b = compose(both, {1.6, 0.0});
  CHECK(near_b.distance == Approx(0.4));
  CHECK(near_b.gradient.x() == Approx(-1.0));

  // equidistant: the first layer supplies the gradient
  const FieldQuery mid = compose(both, {1.0, 0.0});
  CHECK(mid.gradient.x() == Approx(1.0));

  const std::array<FieldLayer, 2> layers = {FieldLayer{&fa, 0.0}, FieldLayer{&fb, 1.0}};
  const FieldQuery offset = compose(layers, {1.5, 0.0});
  CHECK(offset.distance == 0.0);
  CHECK(offset.gradient.x() == Approx(-1.0));
}

TEST_CASE("point files") {
  std::istringstream in("# obstacle\n0 0\n1,2\n\n1 2\n  3.5 -1  \n");
  const auto pts = read_points(in);
  REQUIRE(pts.size() == 3);
  CHECK(pts[1] == Vec2(1.0, 2.0));
  CHECK(pts[2] == Vec2(3.5, -1.0));

  std::istringstream bad("0 0\nnot a point\n");
  CHECK_THROWS(read_points(bad));
}
