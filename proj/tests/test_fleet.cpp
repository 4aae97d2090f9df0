#include <cmath>

#include <doctest.h>

#include "gfdwa/fleet.hpp"

using namespace gfdwa;
using doctest::Approx;

namespace {

std::vector<Vec2> line(Vec2 from, Vec2 step, int n) {
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) out.push_back(from + step * i);
  return out;
}

}  // namespace

TEST_CASE("prediction board") {
  PredictionBoard board;
  board.publish(1, 0, line({0, 0}, {0.1, 0}, 21));
  CHECK(board.size() == 1);
  board.publish(1, 0, line({0, 0}, {0.1, 0}, 21));
  CHECK(board.size() == 1);
  board.publish(1, 1, line({1, 0}, {0.1, 0}, 21));
  CHECK(board.size() == 1);
  CHECK(board.find(1)->step == 1);
  CHECK(board.find(1)->positions.front() == Vec2(1, 0));
  board.publish(2, 1, line({5, 5}, {0, 0.1}, 21));
  CHECK(board.size() == 2);
  CHECK(board.find(3) == nullptr);

  const Trajectory t = rollout({0, 0, 0}, {1.0, 0.0}, 20, 0.2);
  board.publish(3, 2, t);
  REQUIRE(board.find(3)->positions.size() == 21);
  CHECK(board.find(3)->positions.back() == t.back().position());
}

TEST_CASE("fleet field") {
  PredictionBoard board;
  CHECK_FALSE(build_fleet_field(board, 0, KernelParams{}).has_value());
  board.publish(0, 0, line({0, 0}, {0.1, 0}, 21));
  CHECK_FALSE(build_fleet_field(board, 0, KernelParams{}).has_value());

  board.publish(1, 0, line({0, 3}, {0.1, 0}, 21));
  const auto f = build_fleet_field(board, 0, KernelParams{});
  REQUIRE(f.has_value());
  CHECK(f->size() == 21);

  // a parked robot publishes one repeated point
  board.publish(2, 0, std::vector<Vec2>(21, Vec2(9, 9)));
  CHECK(build_fleet_field(board, 0, KernelParams{})->size() == 22);

  board.publish(3, 0, line({0, -3}, {0.1, 0}, 21));
  board.publish(4, 0, line({0, 6}, {0.1, 0}, 21));
  CHECK(build_fleet_field(board, 2, KernelParams{})->size() == 84);
}

TEST_CASE("aligned predictions skip the already elapsed step") {
  PredictionBoard board;
  board.publish(0, 0, line({0, 0}, {0.1, 0}, 21));
  board.publish(1, 0, line({0, 1}, {0.1, 0}, 21));
  const auto a = aligned_predictions(board, 0, 20);
  REQUIRE(a.size() == 1);
  REQUIRE(a[0].size() == 21);
  CHECK(a[0][0].x() == Approx(0.1));
  CHECK(a[0][19].x() == Approx(2.0));
  CHECK(a[0][20].x() == Approx(2.0));
}

TEST_CASE("unified field") {
  const std::vector<Vec2> wall = {{0.8, 0.0}};
  KernelParams exact;
  exact.noise_sigma = 0.0;
  const auto static_field = GpField::fit(wall, exact);

  const UnifiedField solo(&static_field, std::nullopt, 0.5);
  const Vec2 p(0.0, 0.0);
  CHECK(solo.query(p).distance == static_field.query(p).distance);
  CHECK(solo.query(p).gradient == static_field.query(p).gradient);
  CHECK(solo.query(p).distance == Approx(0.8));

  const std::vector<Vec2> robot = {{0.0, 0.9}};
  const UnifiedField both(&static_field, GpField::fit(robot, exact), 0.5);
  const FieldQuery q = both.query(p);
  CHECK(q.distance == 0.0);
  CHECK(q.gradient.y() == Approx(-1.0));

  const std::vector<Vec2> far_robot = {{0.0, 10.0}};
  const UnifiedField distant(&static_field, GpField::fit(far_robot, exact), 0.5);
  CHECK(distant.query(p).distance == Approx(0.8));

  const UnifiedField empty(nullptr, std::nullopt, 0.5);
  CHECK(std::isinf(empty.query(p).distance));
  CHECK(empty.query(p).gradient.isZero(0.0));
}

TEST_CASE("fleet feasibility uses center distance") {
  PlanContext ctx;
  const std::vector<AlignedPrediction> other = {AlignedPrediction(21, Vec2(2.0, 0.0))};
  ctx.fleet = other;
  CHECK_FALSE(is_feasible(rollout({0, 0, 0}, {1.0, 0.0}, 20, 0.2), ctx));
  CHECK(is_feasible(rollout({0, 0, 0}, {0.2, 0.0}, 20, 0.2), ctx));
  // 1.0 m apart is exactly touching and still allowed
  CHECK(is_feasible(rollout({1.0, 0, 0}, {0.0, 0.0}, 20, 0.2), ctx));
}
