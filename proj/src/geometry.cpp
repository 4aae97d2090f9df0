#include "gfdwa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "gfdwa/gpdf.hpp"

namespace gfdwa {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double area2(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return s;
}

// Strict crossing of two segments, touching excluded.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

PolygonObstacle::PolygonObstacle(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() >= 2 && (vertices_.front() - vertices_.back()).norm() < kDuplicateTolerance) {
    vertices_.pop_back();
  }
  if (vertices_.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const double a = area2(vertices_);
  if (std::abs(a) < 1e-12) throw std::invalid_argument("polygon has zero area");
  if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());

  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(vertices_[i], vertices_[(i + 1) % n], vertices_[j], vertices_[(j + 1) % n])) {
        throw std::invalid_argument("polygon is self-intersecting");
      }
    }
  }
  lo_ = hi_ = vertices_.front();
  for (const Vec2& p : vertices_) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
}

double PolygonObstacle::signed_area() const { return 0.5 * area2(vertices_); }


std::vector<Vec2> sample_boundary(const PolygonObstacle& obstacle, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("sampling resolution must be > 0");
  const auto& v = obstacle.vertices();
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const double len = (b - a).norm();
    const auto segs = std::max<long>(1, static_cast<long>(std::ceil(len / resolution - 1e-9)));
    for (long j = 0; j < segs; ++j) {
      pts.push_back(a + (b - a) * (static_cast<double>(j) / static_cast<double>(segs)));
    }
  }
  return pts;
}

std::vector<Vec2> sample_boundaries(std::span<const PolygonObstacle> obstacles, double resolution) {
  std::vector<Vec2> all;
  for (const auto& o : obstacles) {
    auto pts = sample_boundary(o, resolution);
    all.insert(all.end(), pts.begin(), pts.end());
  }
  return dedupe_points(all);
}

namespace {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPoint, false, true>;
using BMulti = bg::model::multi_polygon<BPoly>;

BPoly to_boost(const std::vector<Vec2>& ring) {
  BPoly poly;
  for (const Vec2& p : ring) bg::append(poly.outer(), BPoint(p.x(), p.y()));
  bg::append(poly.outer(), BPoint(ring.front().x(), ring.front().y()));
  bg::correct(poly);
  return poly;
}

// Regular polygon whose faces are tangent to the circle at angles k*pi/8.
std::vector<Vec2> circumscribed_disc(const Vec2& c, double r) {
  constexpr int n = 2 * kArcSegmentsPerHalfTurn;
  const double step = 2.0 * std::numbers::pi / n;
  const double rv = r / std::cos(step / 2.0);
  std::vector<Vec2> ring;
  for (int k = 0; k < n; ++k) {
    const double a = (k + 0.5) * step;
    ring.emplace_back(c.x() + rv * std::cos(a), c.y() + rv * std::sin(a));
  }
  return ring;
}

std::vector<Vec2> drop_collinear(std::vector<Vec2> ring) {
  bool changed = true;
  while (changed && ring.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size() && ring.size() > 3; ++i) {
      const Vec2& prev = ring[(i + ring.size() - 1) % ring.size()];
      const Vec2& cur = ring[i];
      const Vec2& next = ring[(i + 1) % ring.size()];
      const double span = (next - prev).norm();
      if ((cur - prev).norm() < 1e-9 || std::abs(cross(cur - prev, next - prev)) < 1e-12 * std::max(1.0, span)) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return ring;
}

}  // namespace

PolygonObstacle inflate(const PolygonObstacle& obstacle, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("inflation radius must be >= 0");
  if (radius == 0.0) return obstacle;

  const auto& v = obstacle.vertices();
  BMulti acc;
  acc.push_back(to_boost(v));
  auto merge = [&](const std::vector<Vec2>& ring) {
    BMulti out;
    bg::union_(acc, to_boost(ring), out);
    acc = std::move(out);
  };

  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    const Vec2 dir = b - a;
    const Vec2 n = Vec2(dir.y(), -dir.x()).normalized() * radius;
    merge({a - n, b - n, b + n, a + n});
  }
  for (const Vec2& c : v) merge(circumscribed_disc(c, radius));

  // The sum of a simple polygon and a disc is connected; interior holes
  // would be unreachable free space and are filled.
  const auto largest = std::max_element(acc.begin(), acc.end(), [](const BPoly& x, const BPoly& y) {
    return bg::area(x) < bg::area(y);
  });
  if (largest == acc.end()) throw std::runtime_error("inflation produced an empty polygon");

  std::vector<Vec2> ring;
  for (const BPoint& p : largest->outer()) ring.emplace_back(p.x(), p.y());
  if (ring.size() > 1) ring.pop_back();
  return PolygonObstacle(drop_collinear(std::move(ring)));
}

std::vector<PolygonObstacle> inflate_all(std::span<const PolygonObstacle> obstacles, double radius) {
  std::vector<PolygonObstacle> out;
  out.reserve(obstacles.size());
  for (const auto& o : obstacles) out.push_back(inflate(o, radius));
  return out;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double distance_to_boundary(const PolygonObstacle& polygon, const Vec2& p) {
  const auto& v = polygon.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, distance_to_segment(p, v[i], v[(i + 1) % v.size()]));
  }
  return best;
}

bool contains(const PolygonObstacle& polygon, const Vec2& p) {
  const auto& v = polygon.vertices();
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (distance_to_segment(p, v[j], v[i]) <= 1e-12) return true;
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_collision(const Vec2& p, std::span<const PolygonObstacle> obstacles) {
  for (const auto& o : obstacles) {
    const auto [lo, hi] = o.bounds();
    if (p.x() < lo.x() || p.y() < lo.y() || p.x() > hi.x() || p.y() > hi.y()) continue;
    if (contains(o, p)) return true;
  }
  return false;
}

}  // namespace gfdwa
