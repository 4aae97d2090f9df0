#pragma once

#include <span>
#include <vector>

#include "gfdwa/types.hpp"

namespace gfdwa {

/// Simple (possibly non-convex) polygon with counterclockwise vertices.
class PolygonObstacle {
 public:
  /// Reorders clockwise input to counterclockwise. Throws
  /// std::invalid_argument on fewer than three vertices, zero area, or
  /// self-intersection.
  explicit PolygonObstacle(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double signed_area() const;

  /// Axis-aligned bounds as (min, max).
  std::pair<Vec2, Vec2> bounds() const { return {lo_, hi_}; }

 private:
  std::vector<Vec2> vertices_;
  Vec2 lo_;
  Vec2 hi_;
};

struct RobotShape {
  double radius = 0.5;
};

/// Points along every edge at spacing <= resolution, each vertex once,
/// ordered by edge then arc length.
std::vector<Vec2> sample_boundary(const PolygonObstacle& obstacle, double resolution);

/// Samples every obstacle and merges duplicates.
std::vector<Vec2> sample_boundaries(std::span<const PolygonObstacle> obstacles,
                                    double resolution);

/// Segments used per half turn when approximating the offset arcs.
inline constexpr int kArcSegmentsPerHalfTurn = 8;

/// Minkowski sum with a disc. Arcs are circumscribed so the result always
/// contains the exact sum.
PolygonObstacle inflate(const PolygonObstacle& obstacle, double radius);

std::vector<PolygonObstacle> inflate_all(std::span<const PolygonObstacle> obstacles,
                                         double radius);

/// Even-odd containment; points on the boundary count as inside.
bool contains(const PolygonObstacle& polygon, const Vec2& p);

bool point_in_collision(const Vec2& p, std::span<const PolygonObstacle> obstacles);

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Unsigned distance from p to the polygon outline.
double distance_to_boundary(const PolygonObstacle& polygon, const Vec2& p);

}  // namespace gfdwa
