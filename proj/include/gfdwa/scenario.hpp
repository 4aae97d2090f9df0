#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfdwa/dwa.hpp"
#include "gfdwa/fleet.hpp"
#include "gfdwa/geometry.hpp"
#include "gfdwa/gpdf.hpp"

namespace gfdwa {

/// Document does not match the schema. The message starts with the
/// offending field path, e.g. "robots[1].v_ref: missing required field".
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document is well-formed but describes an impossible scenario.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RobotSpec {
  RobotId id = 0;
  RobotState start;
  Vec2 goal = Vec2::Zero();
  Polyline reference_path;
  double v_ref = 1.0;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<PolygonObstacle> obstacles;
  std::vector<RobotSpec> robots;
  ControlLimits limits;
  SamplingConfig sampling;
  CostWeights weights;
  KernelParams kernel;
  int horizon = 20;
  double dt = 0.2;
  int step_budget = 400;
  double goal_tolerance = 0.5;
  double robot_radius = 0.5;
  double boundary_resolution = 0.1;
};

Scenario load_scenario(const nlohmann::json& doc);
/// Parse errors are reported as SchemaError prefixed with the file path.
Scenario load_scenario_file(const std::filesystem::path& path);

/// Full document including every defaulted field.
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Sets a dotted field ("weights.q_col_grad", "robots.0.v_ref") in a
/// normalized scenario document. The value is parsed as JSON when possible,
/// otherwise taken as a string. Throws SchemaError for unknown fields.
void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value);

struct PathProjection {
  Vec2 point = Vec2::Zero();
  double arc_length = 0.0;
};

/// Closest point on the polyline; equidistant candidates resolve to the
/// smallest arc length.
PathProjection project_onto_path(const Polyline& path, const Vec2& p);

double path_length(const Polyline& path);
Vec2 point_at_arc_length(const Polyline& path, double s);

class EmptyPath : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// N positions marched at v_ref * dt spacing along the path from the
/// projection of `current`, saturating at the final vertex.
std::vector<Vec2> sample_reference(const Polyline& path, const Vec2& current, double v_ref,
                                   double dt, int steps);

}  // namespace gfdwa
