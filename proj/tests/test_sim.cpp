#include <algorithm>
#include <limits>

#include <doctest.h>

#include "gfdwa/sim.hpp"
#include "support.hpp"

using namespace gfdwa;
using doctest::Approx;

namespace {

std::vector<TraceRecord> robot_trace(const SimOutcome& o, RobotId id) {
  std::vector<TraceRecord> out;
  for (const auto& r : o.trace) {
    if (r.robot == id) out.push_back(r);
  }
  return out;
}

RobotOutcome reached(RobotId id, int steps) {
  RobotOutcome r;
  r.id = id;
  r.status = RobotStatus::Reached;
  r.steps_to_goal = steps;
  return r;
}

}  // namespace

TEST_CASE("metrics summary") {
  SimOutcome o;
  o.robots = {reached(0, 120), reached(1, 135)};
  const auto ok = metrics(o, 200);
  CHECK(ok.success);
  CHECK(ok.max_steps == 135);
  CHECK(ok.reached == 2);

  o.robots[1].status = RobotStatus::Collided;
  o.robots[1].steps_to_goal.reset();
  o.robots[1].collision_step = 40;
  CHECK_FALSE(metrics(o, 200).success);
  CHECK(metrics(o, 200).collided == 1);

  o.robots[1].status = RobotStatus::Timeout;
  o.robots[1].collision_step.reset();
  const auto late = metrics(o, 200);
  CHECK_FALSE(late.success);
  CHECK(late.max_steps == 200);
  CHECK(late.timed_out == 1);
}

TEST_CASE("runs are reproducible") {
  const Scenario s = testing::bundled("s1");
  const SimOutcome a = run(s, {Execution::Serial, false});
  const SimOutcome b = run(s, {Execution::Serial, false});
  const SimOutcome c = run(s, {Execution::Parallel, false});
  CHECK(a.trace == b.trace);
  CHECK(a.trace == c.trace);
  CHECK(a.steps_run == b.steps_run);
}

TEST_CASE("robot order in the file does not matter") {
  Scenario s = testing::bundled("multi1");
  const SimOutcome a = run(s);
  std::reverse(s.robots.begin(), s.robots.end());
  const SimOutcome b = run(s);
  for (const auto& r : s.robots) CHECK(robot_trace(a, r.id) == robot_trace(b, r.id));
}

TEST_CASE("trace records follow the robots") {
  const Scenario s = testing::bundled("multi1");
  const SimOutcome o = run(s);
  const auto m = metrics(o, s.step_budget);
  CHECK(m.success);
  CHECK(o.min_inter_robot_distance >= 2.0 * s.robot_radius);

  for (const auto& r : o.robots) {
    REQUIRE(r.steps_to_goal.has_value());
    const auto t = robot_trace(o, r.id);
    CHECK(static_cast<int>(t.size()) == *r.steps_to_goal);
    CHECK((t.back().state.position() - s.robots[static_cast<std::size_t>(r.id)].goal).norm() <=
          s.goal_tolerance);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k].step == static_cast<int>(k));
  }
  for (std::size_t i = 1; i < o.trace.size(); ++i) {
    const auto& a = o.trace[i - 1];
    const auto& b = o.trace[i];
    CHECK((a.step < b.step || (a.step == b.step && a.robot < b.robot)));
  }
}

TEST_CASE("a single robot sees only the static field") {
  const Scenario s = testing::bundled("s4");
  const SimOutcome o = run(s, {Execution::Serial, false});

  const auto inflated = inflate_all(s.obstacles, s.robot_radius);
  const auto field = GpField::fit(testing::static_points(s), s.kernel);
  const UnifiedField unified(&field, std::nullopt, s.robot_radius);
  const RobotSpec& spec = s.robots.front();
  RobotState state = spec.start;
  ControlInput prev;
  for (const auto& rec : o.trace) {
    const auto reference = sample_reference(spec.reference_path, state.position(), spec.v_ref, s.dt, s.horizon);
    PlanContext ctx;
    ctx.field = &unified;
    ctx.inflated_obstacles = inflated;
    ctx.reference = reference;
    ctx.target = spec.goal;
    ctx.v_ref = spec.v_ref;
    ctx.weights = s.weights;
    ctx.limits = s.limits;
    ctx.sampling = s.sampling;
    ctx.horizon = s.horizon;
    ctx.dt = s.dt;
    ctx.robot_radius = s.robot_radius;
    const PlanResult p = plan(state, prev, ctx, Execution::Serial);
    REQUIRE(p.control == rec.control);
    state = step(state, p.control, s.dt);
    prev = p.control;
    CHECK(state == rec.state);
  }
}

TEST_CASE("trace serialization") {
  TraceRecord r;
  r.step = 3;
  r.robot = 1;
  r.j_col_dist = std::numeric_limits<double>::infinity();
  r.total = std::numeric_limits<double>::infinity();
  const auto j = trace_record_to_json(r);
  CHECK(j["step"] == 3);
  CHECK(j["cost"]["col_dist"].is_null());
  CHECK(j["cost"]["ref"] == 0.0);
  CHECK_FALSE(j.contains("selected_path"));

  r.selected_path = {{0, 0}, {1, 0}};
  CHECK(trace_record_to_json(r)["selected_path"].size() == 2);
}
