#include "gfdwa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace gfdwa {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_fail(path, "expected an integer");
  return j.get<int>();
}

Vec2 as_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [x, y]");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

std::vector<Vec2> as_points(const json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected a list of [x, y]");
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(as_vec2(j[i], path + "[" + std::to_string(i) + "]"));
  return pts;
}

ControlInput as_control(const json& j, const std::string& path) {
  const Vec2 v = as_vec2(j, path);
  return {v.x(), v.y()};
}

// Reads obj[key] into out when present.
template <typename F>
void optional_field(const json& obj, const std::string& key, const std::string& path, F&& read) {
  auto it = obj.find(key);
  if (it != obj.end()) read(*it, path.empty() ? key : path + "." + key);
}

void read_number(const json& obj, const std::string& key, const std::string& path, double& out) {
  optional_field(obj, key, path, [&](const json& j, const std::string& p) { out = as_number(j, p); });
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  for (const auto& [k, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      schema_fail(path.empty() ? k : path + "." + k, "unknown field");
    }
  }
}

template <typename F>
void wrap_invalid(const std::string& path, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    schema_fail(path, e.what());
  }
}

}  // namespace

Scenario load_scenario(const json& doc) {
  check_keys(doc, "", {"name", "description", "obstacles", "robots", "limits", "sampling", "weights",
                       "kernel", "horizon", "dt", "step_budget", "goal_tolerance", "robot_radius",
                       "boundary_resolution"});
  Scenario s;
  const json& name = require(doc, "name", "");
  if (!name.is_string()) schema_fail("name", "expected a string");
  s.name = name.get<std::string>();
  optional_field(doc, "description", "", [&](const json& j, const std::string& p) {
    if (!j.is_string()) schema_fail(p, "expected a string");
    s.description = j.get<std::string>();
  });

  optional_field(doc, "horizon", "", [&](const json& j, const std::string& p) { s.horizon = as_int(j, p); });
  optional_field(doc, "step_budget", "", [&](const json& j, const std::string& p) { s.step_budget = as_int(j, p); });
  read_number(doc, "dt", "", s.dt);
  read_number(doc, "goal_tolerance", "", s.goal_tolerance);
  read_number(doc, "robot_radius", "", s.robot_radius);
  read_number(doc, "boundary_resolution", "", s.boundary_resolution);
  if (s.horizon < 1) schema_fail("horizon", "must be >= 1");
  if (s.step_budget < 1) schema_fail("step_budget", "must be >= 1");
  if (!(s.dt > 0)) schema_fail("dt", "must be > 0");
  if (!(s.goal_tolerance > 0)) schema_fail("goal_tolerance", "must be > 0");
  if (!(s.robot_radius > 0)) schema_fail("robot_radius", "must be > 0");
  if (!(s.boundary_resolution > 0)) schema_fail("boundary_resolution", "must be > 0");

  optional_field(doc, "kernel", "", [&](const json& j, const std::string& p) {
    check_keys(j, p, {"sigma", "length_scale", "noise_sigma"});
    read_number(j, "sigma", p, s.kernel.sigma);
    read_number(j, "length_scale", p, s.kernel.length_scale);
    read_number(j, "noise_sigma", p, s.kernel.noise_sigma);
    wrap_invalid(p, [&] { s.kernel.validate(); });
  });
  optional_field(doc, "limits", "", [&](const json& j, const std::string& p) {
    check_keys(j, p, {"u_min", "u_max", "du_minus_max", "du_plus_max"});
    auto ctl = [&](const char* key, ControlInput& out) {
      optional_field(j, key, p, [&](const json& v, const std::string& q) { out = as_control(v, q); });
    };
    ctl("u_min", s.limits.u_min);
    ctl("u_max", s.limits.u_max);
    ctl("du_minus_max", s.limits.du_minus_max);
    ctl("du_plus_max", s.limits.du_plus_max);
    wrap_invalid(p, [&] { s.limits.validate(); });
  });
  optional_field(doc, "sampling", "", [&](const json& j, const std::string& p) {
    check_keys(j, p, {"dv", "domega", "cap"});
    read_number(j, "dv", p, s.sampling.dv);
    read_number(j, "domega", p, s.sampling.domega);
    optional_field(j, "cap", p, [&](const json& v, const std::string& q) {
      const int cap = as_int(v, q);
      if (cap < 1) schema_fail(q, "must be >= 1");
      s.sampling.cap = static_cast<std::size_t>(cap);
    });
    wrap_invalid(p, [&] { s.sampling.validate(); });
  });
  optional_field(doc, "weights", "", [&](const json& j, const std::string& p) {
    check_keys(j, p, {"q_col", "q_col_dist", "q_col_grad", "q_ref", "q_vel", "q_tar", "beta",
                      "dtheta_thre", "activation_range"});
    CostWeights& w = s.weights;
    read_number(j, "q_col", p, w.q_col);
    read_number(j, "q_col_dist", p, w.q_col_dist);
    read_number(j, "q_col_grad", p, w.q_col_grad);
    read_number(j, "q_ref", p, w.q_ref);
    read_number(j, "q_vel", p, w.q_vel);
    read_number(j, "q_tar", p, w.q_tar);
    read_number(j, "beta", p, w.beta);
    read_number(j, "dtheta_thre", p, w.dtheta_thre);
    read_number(j, "activation_range", p, w.activation_range);
    wrap_invalid(p, [&] { w.validate(); });
  });

  const json& obstacles = require(doc, "obstacles", "");
  if (!obstacles.is_array()) schema_fail("obstacles", "expected a list of polygons");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const std::string p = "obstacles[" + std::to_string(i) + "]";
    auto verts = as_points(obstacles[i], p);
    wrap_invalid(p, [&] { s.obstacles.emplace_back(std::move(verts)); });
  }

  const json& robots = require(doc, "robots", "");
  if (!robots.is_array() || robots.empty()) schema_fail("robots", "expected a non-empty list");
  std::set<RobotId> ids;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const std::string p = "robots[" + std::to_string(i) + "]";
    const json& r = robots[i];
    check_keys(r, p, {"id", "start", "goal", "reference_path", "v_ref"});
    RobotSpec spec;
    spec.id = as_int(require(r, "id", p), p + ".id");
    const json& start = require(r, "start", p);
    if (!start.is_array() || start.size() != 3) schema_fail(p + ".start", "expected [x, y, theta]");
    spec.start = {as_number(start[0], p + ".start[0]"), as_number(start[1], p + ".start[1]"),
                  wrap_angle(as_number(start[2], p + ".start[2]"))};
    spec.goal = as_vec2(require(r, "goal", p), p + ".goal");
    spec.reference_path = as_points(require(r, "reference_path", p), p + ".reference_path");
    if (spec.reference_path.size() < 2) schema_fail(p + ".reference_path", "needs at least 2 vertices");
    spec.v_ref = as_number(require(r, "v_ref", p), p + ".v_ref");
    if (!(spec.v_ref > 0)) schema_fail(p + ".v_ref", "must be > 0");
    if (!ids.insert(spec.id).second) schema_fail(p + ".id", "duplicate robot id " + std::to_string(spec.id));
    s.robots.push_back(std::move(spec));
  }

  const auto inflated = inflate_all(s.obstacles, s.robot_radius);
  for (const RobotSpec& r : s.robots) {
    const std::string who = "robot " + std::to_string(r.id);
    if (point_in_collision(r.start.position(), inflated)) {
      throw InvariantViolation(who + ": start lies inside an inflated obstacle");
    }
    if (point_in_collision(r.goal, inflated)) {
      throw InvariantViolation(who + ": goal lies inside an inflated obstacle");
    }
    if ((r.reference_path.front() - r.start.position()).norm() > 1.0) {
      throw InvariantViolation(who + ": reference path does not start near the start pose");
    }
    if ((r.reference_path.back() - r.goal).norm() > s.goal_tolerance) {
      throw InvariantViolation(who + ": reference path does not end at the goal");
    }
  }
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    for (std::size_t j = i + 1; j < s.robots.size(); ++j) {
      if ((s.robots[i].start.position() - s.robots[j].start.position()).norm() < 2.0 * s.robot_radius) {
        throw InvariantViolation("robots " + std::to_string(s.robots[i].id) + " and " +
                                 std::to_string(s.robots[j].id) + ": starts overlap");
      }
    }
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  try {
    return load_scenario(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(path.string() + ": " + e.what());
  }
}

namespace {

json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json to_json(const ControlInput& u) { return json::array({u.v, u.omega}); }

}  // namespace

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["description"] = s.description;
  doc["horizon"] = s.horizon;
  doc["dt"] = s.dt;
  doc["step_budget"] = s.step_budget;
  doc["goal_tolerance"] = s.goal_tolerance;
  doc["robot_radius"] = s.robot_radius;
  doc["boundary_resolution"] = s.boundary_resolution;
  doc["kernel"] = {{"sigma", s.kernel.sigma}, {"length_scale", s.kernel.length_scale},
                   {"noise_sigma", s.kernel.noise_sigma}};
  doc["limits"] = {{"u_min", to_json(s.limits.u_min)}, {"u_max", to_json(s.limits.u_max)},
                   {"du_minus_max", to_json(s.limits.du_minus_max)},
                   {"du_plus_max", to_json(s.limits.du_plus_max)}};
  doc["sampling"] = {{"dv", s.sampling.dv}, {"domega", s.sampling.domega}, {"cap", s.sampling.cap}};
  const CostWeights& w = s.weights;
  doc["weights"] = {{"q_col", w.q_col},   {"q_col_dist", w.q_col_dist}, {"q_col_grad", w.q_col_grad},
                    {"q_ref", w.q_ref},   {"q_vel", w.q_vel},           {"q_tar", w.q_tar},
                    {"beta", w.beta},     {"dtheta_thre", w.dtheta_thre},
                    {"activation_range", w.activation_range}};
  doc["obstacles"] = json::array();
  for (const auto& o : s.obstacles) {
    json poly = json::array();
    for (const Vec2& v : o.vertices()) poly.push_back(to_json(v));
    doc["obstacles"].push_back(std::move(poly));
  }
  doc["robots"] = json::array();
  for (const auto& r : s.robots) {
    json path = json::array();
    for (const Vec2& v : r.reference_path) path.push_back(to_json(v));
    doc["robots"].push_back({{"id", r.id},
                             {"start", {r.start.x, r.start.y, r.start.theta}},
                             {"goal", to_json(r.goal)},
                             {"reference_path", std::move(path)},
                             {"v_ref", r.v_ref}});
  }
  return doc;
}

void apply_override(json& doc, const std::string& key, const std::string& value) {
  json* node = &doc;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const std::size_t dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        schema_fail(key, "expected a list index at '" + part + "'");
      }
      if (idx >= node->size()) schema_fail(key, "index out of range");
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(part)) {
      node = &(*node)[part];
    } else {
      schema_fail(key, "unknown field");
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  json parsed = json::parse(value, nullptr, false);
  *node = parsed.is_discarded() ? json(value) : parsed;
}

double path_length(const Polyline& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

PathProjection project_onto_path(const Polyline& path, const Vec2& p) {
  if (path.size() < 2) throw EmptyPath("reference path needs at least 2 vertices");
  PathProjection best;
  double best_d = std::numeric_limits<double>::infinity();
  double s0 = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec2& a = path[i - 1];
    const Vec2 ab = path[i] - a;
    const double len = ab.norm();
    const double t = len > 0 ? std::clamp((p - a).dot(ab) / (len * len), 0.0, 1.0) : 0.0;
    const Vec2 q = a + t * ab;
    const double d = (p - q).norm();
    if (d < best_d - 1e-12) {
      best_d = d;
      best = {q, s0 + t * len};
    }
    s0 += len;
  }
  return best;
}

Vec2 point_at_arc_length(const Polyline& path, double s) {
  if (path.empty()) throw EmptyPath("reference path is empty");
  double s0 = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double len = (path[i] - path[i - 1]).norm();
    if (s <= s0 + len && len > 0) {
      return path[i - 1] + (path[i] - path[i - 1]) * std::clamp((s - s0) / len, 0.0, 1.0);
    }
    s0 += len;
  }
  return path.back();
}

std::vector<Vec2> sample_reference(const Polyline& path, const Vec2& current, double v_ref,
                                   double dt, int steps) {
  const PathProjection proj = project_onto_path(path, current);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  for (int k = 1; k <= steps; ++k) {
    out.push_back(point_at_arc_length(path, proj.arc_length + k * v_ref * dt));
  }
  return out;
}

}  // namespace gfdwa
