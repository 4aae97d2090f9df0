#include <string>

#include <doctest.h>

#include "gfdwa/scenario.hpp"
#include "support.hpp"

using namespace gfdwa;
using doctest::Approx;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "name": "t",
    "obstacles": [[[4, -1], [5, -1], [5, 1], [4, 1]]],
    "robots": [{"id": 0, "start": [0, 0, 0], "goal": [8, 0],
                "reference_path": [[0, 0], [8, 0]], "v_ref": 1.0}]
  })");
}

std::string message_of(const json& doc) {
  try {
    load_scenario(doc);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("reference sampling") {
  const Polyline path = {{0, 0}, {10, 0}};
  const auto ref = sample_reference(path, {0.0, 0.5}, 1.0, 0.2, 3);
  REQUIRE(ref.size() == 3);
  CHECK(ref[0].x() == Approx(0.2));
  CHECK(ref[1].x() == Approx(0.4));
  CHECK(ref[2].x() == Approx(0.6));
  for (const Vec2& p : ref) CHECK(p.y() == 0.0);

  const auto past = sample_reference(path, {12.0, 0.0}, 1.0, 0.2, 4);
  for (const Vec2& p : past) CHECK(p == Vec2(10, 0));

  const Polyline bend = {{0, 0}, {2, 0}, {2, 2}};
  const auto turn = sample_reference(bend, {1.9, 0.0}, 1.0, 0.2, 3);
  CHECK((turn[0] - Vec2(2.0, 0.1)).norm() < 1e-12);
  CHECK((turn[2] - Vec2(2.0, 0.5)).norm() < 1e-12);
  for (std::size_t i = 1; i < turn.size(); ++i) CHECK((turn[i] - turn[i - 1]).norm() <= 0.2 + 1e-9);

  // equidistant from both legs: the earlier one wins
  const Polyline vee = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const auto tie = project_onto_path(vee, {1.0, 1.0});
  CHECK(tie.arc_length == Approx(1.0));

  CHECK(path_length(bend) == Approx(4.0));
  CHECK(point_at_arc_length(bend, 3.0) == Vec2(2, 1));
  CHECK_THROWS_AS(sample_reference(Polyline{{0, 0}}, {0, 0}, 1.0, 0.2, 3), EmptyPath);
}

TEST_CASE("schema validation") {
  CHECK_NOTHROW(load_scenario(minimal()));

  json missing = minimal();
  missing["robots"][0].erase("v_ref");
  CHECK_THROWS_AS(load_scenario(missing), SchemaError);
  CHECK(message_of(missing).find("robots[0].v_ref") != std::string::npos);

  json unknown = minimal();
  unknown["weights"] = {{"q_colgrad", 1.0}};
  CHECK_THROWS_AS(load_scenario(unknown), SchemaError);

  json wrong_type = minimal();
  wrong_type["horizon"] = "twenty";
  CHECK_THROWS_AS(load_scenario(wrong_type), SchemaError);

  json dup = minimal();
  json second = dup["robots"][0];
  second["start"] = {0, 3, 0};
  second["reference_path"] = {{0, 3}, {8, 3}};
  second["goal"] = {8, 3};
  dup["robots"].push_back(second);
  CHECK_THROWS_AS(load_scenario(dup), SchemaError);
}

TEST_CASE("invariant validation") {
  json inside = minimal();
  inside["robots"][0]["start"] = {4.2, 0, 0};
  inside["robots"][0]["reference_path"] = {{4.2, 0}, {8, 0}};
  CHECK_THROWS_AS(load_scenario(inside), InvariantViolation);
  CHECK(message_of(inside).find("robot 0") != std::string::npos);

  json goal = minimal();
  goal["robots"][0]["goal"] = {3.7, 0};
  goal["robots"][0]["reference_path"] = {{0, 0}, {3.7, 0}};
  CHECK_THROWS_AS(load_scenario(goal), InvariantViolation);

  json detached = minimal();
  detached["robots"][0]["reference_path"] = {{0, 3}, {8, 0}};
  CHECK_THROWS_AS(load_scenario(detached), InvariantViolation);

  json overlap = minimal();
  json twin = overlap["robots"][0];
  twin["id"] = 1;
  twin["start"] = {0.5, 0, 0};
  twin["reference_path"] = {{0.5, 0}, {8, 0}};
  overlap["robots"].push_back(twin);
  CHECK_THROWS_AS(load_scenario(overlap), InvariantViolation);
}

TEST_CASE("overrides") {
  json doc = scenario_to_json(load_scenario(minimal()));
  apply_override(doc, "weights.q_col_grad", "0");
  apply_override(doc, "robots.0.v_ref", "0.8");
  apply_override(doc, "limits.du_plus_max", "[0.4, 0.2]");
  const Scenario s = load_scenario(doc);
  CHECK(s.weights.q_col_grad == 0.0);
  CHECK(s.robots[0].v_ref == 0.8);
  CHECK(s.limits.du_plus_max == ControlInput{0.4, 0.2});
  CHECK_THROWS_AS(apply_override(doc, "weights.nope", "1"), SchemaError);
  CHECK_THROWS_AS(apply_override(doc, "robots.3.v_ref", "1"), SchemaError);
}

TEST_CASE("round trip through the document form") {
  const Scenario a = testing::bundled("s3");
  const Scenario b = load_scenario(scenario_to_json(a));
  CHECK(scenario_to_json(a) == scenario_to_json(b));
}

TEST_CASE("bundled fixtures") {
  for (const char* name : {"s1", "s2", "s3", "s4", "s5", "multi1", "multi2"}) {
    CAPTURE(name);
    const Scenario s = testing::bundled(name);
    CHECK(s.name == name);
    CHECK_FALSE(s.robots.empty());
  }
  const Scenario s3 = testing::bundled("s3");
  REQUIRE(s3.obstacles.size() == 1);
  CHECK(s3.obstacles[0].size() == 8);
  CHECK(testing::bundled("multi1").robots.size() == 4);
  CHECK(testing::bundled("multi1").step_budget == 200);
  CHECK(testing::bundled("multi2").robots.size() == 2);
  CHECK_THROWS_AS(load_scenario_file(testing::scenario_path("missing")), SchemaError);
}
