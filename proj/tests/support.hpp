#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "gfdwa/geometry.hpp"
#include "gfdwa/gpdf.hpp"
#include "gfdwa/scenario.hpp"

namespace gfdwa::testing {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(GFDWA_SCENARIO_DIR) / (name + ".json");
}

inline Scenario bundled(const std::string& name) { return load_scenario_file(scenario_path(name)); }

/// Fixtures that contain static obstacles.
inline const std::vector<std::string>& obstacle_fixtures() {
  static const std::vector<std::string> names = {"s1", "s2", "s3", "s4", "s5", "multi2"};
  return names;
}

/// Boundary samples of the inflated obstacles, as the simulator fits them.
inline std::vector<Vec2> static_points(const Scenario& sc) {
  return sample_boundaries(inflate_all(sc.obstacles, sc.robot_radius), sc.boundary_resolution);
}

inline double brute_force_distance(std::span<const Vec2> points, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& q : points) best = std::min(best, (p - q).norm());
  return best;
}

inline Vec2 central_difference(const GpField& field, const Vec2& p, double h) {
  const Vec2 ex(h, 0.0);
  const Vec2 ey(0.0, h);
  return {(field.distance(p + ex) - field.distance(p - ex)) / (2.0 * h),
          (field.distance(p + ey) - field.distance(p - ey)) / (2.0 * h)};
}

inline std::pair<Vec2, Vec2> padded_bounds(std::span<const Vec2> points, double pad) {
  Vec2 lo = points.front();
  Vec2 hi = points.front();
  for (const Vec2& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo - Vec2(pad, pad), hi + Vec2(pad, pad)};
}

}  // namespace gfdwa::testing
