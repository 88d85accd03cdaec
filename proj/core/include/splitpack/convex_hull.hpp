#pragma once

#include "splitpack/geometry.hpp"

#include <array>
#include <span>
#include <vector>

namespace splitpack {

using Vec2 = Eigen::Vector2d;

struct ConvexHull {
  std::vector<Point3> vertices;
  /// Counter-clockwise seen from outside.
  std::vector<std::array<int, 3>> faces;

  double volume() const;
  Vec3 face_normal(std::size_t face) const;
  double face_area(std::size_t face) const;
};

/// Convex hull of a 3D point set (incremental construction).
/// Throws DegenerateInput when the points do not span a volume.
ConvexHull convex_hull(std::span<const Point3> points);

/// Extreme points of a set of any dimensionality: the 3D hull vertices when
/// the set spans a volume, otherwise the vertices of the planar hull, the
/// two ends of a segment, or a single point.
std::vector<Point3> hull_vertices(std::span<const Point3> points);

/// Indices of the 2D convex hull, counter-clockwise, collinear points dropped.
std::vector<int> convex_hull_2d(std::span<const Vec2> points);

struct Rectangle2 {
  Vec2 u = Vec2::UnitX();  // first side direction; second is perp(u)
  Vec2 min = Vec2::Zero();  // in (u, perp(u)) coordinates
  Vec2 max = Vec2::Zero();
  double area() const { return (max - min).prod(); }
};

/// Minimum-area enclosing rectangle of a convex polygon (rotating calipers).
Rectangle2 min_area_rectangle(std::span<const Vec2> polygon);

}  // namespace splitpack
