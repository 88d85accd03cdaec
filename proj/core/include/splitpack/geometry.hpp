#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <limits>
#include <span>
#include <vector>

namespace splitpack {

using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rotation stored as a unit quaternion (w, x, y, z).
class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  /// Normalizes the given components; a zero quaternion becomes identity.
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_matrix(const Mat3& rotation);
  static UnitQuaternion from_axis_angle(const Vec3& axis, double radians);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Mat3 matrix() const;
  Vec3 rotate(const Vec3& v) const;
  UnitQuaternion conjugate() const { return raw(w_, -x_, -y_, -z_); }
  double norm() const;

  /// Rotation angle in [0, pi] of the represented rotation.
  double angle() const;

  /// Hamilton product: (a * b) applies b first, then a.
  friend UnitQuaternion operator*(const UnitQuaternion& a,
                                  const UnitQuaternion& b);

  bool operator==(const UnitQuaternion&) const = default;

  /// Builds a quaternion from components already known to be unit length.
  static UnitQuaternion raw(double w, double x, double y, double z);

 private:
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

/// p -> rotation(p) + translation
struct RigidTransform {
  UnitQuaternion rotation;
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Point3 apply(const Point3& p) const {
    return rotation.rotate(p) + translation;
  }
  RigidTransform inverse() const;

  /// Transform equivalent to applying `first`, then `*this`.
  RigidTransform after(const RigidTransform& first) const;
};

RigidTransform compose(const RigidTransform& second,
                       const RigidTransform& first);

struct OrientedBox {
  Point3 center = Point3::Zero();
  /// Rows of a proper rotation matrix; axes[i] spans half_extents[i].
  std::array<Vec3, 3> axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  Vec3 half_extents = Vec3::Zero();

  double volume() const {
    return 8.0 * half_extents.x() * half_extents.y() * half_extents.z();
  }
  Vec3 extents() const { return 2.0 * half_extents; }
  double max_extent() const { return 2.0 * half_extents.maxCoeff(); }

  /// Rotation taking world coordinates into the box frame.
  Mat3 frame() const;

  bool contains(const Point3& p, double tolerance) const;
  std::array<Point3, 8> corners() const;
};

struct Aabb {
  Point3 min = Point3::Constant(std::numeric_limits<double>::infinity());
  Point3 max = Point3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Point3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool empty() const { return !(min.x() <= max.x()); }
  Vec3 extents() const { return empty() ? Vec3::Zero() : Vec3(max - min); }
  double volume() const { return extents().prod(); }
};

Aabb bounding_box(std::span<const Point3> points);

double signed_tet_volume(const Point3& a, const Point3& b, const Point3& c,
                         const Point3& d);

/// |det(b-a, c-a, d-a)| / 6
double tet_volume(const Point3& a, const Point3& b, const Point3& c,
                  const Point3& d);

/// Inclusive point-in-tetrahedron test; orientation of the tet is irrelevant.
bool point_in_tet(const Point3& p, const Point3& a, const Point3& b,
                  const Point3& c, const Point3& d, double tolerance = 1e-12);

/// Centroid and covariance eigen-frame of a point set. Eigenvectors are
/// sorted by decreasing eigenvalue and form a right-handed basis.
struct PrincipalFrame {
  Point3 centroid = Point3::Zero();
  Mat3 axes = Mat3::Identity();  // columns
  Vec3 eigenvalues = Vec3::Zero();
};

PrincipalFrame principal_frame(std::span<const Point3> points);

/// Best-fit plane through points in the least-squares sense.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;  // normal . p = offset on the plane

  double signed_distance(const Point3& p) const {
    return normal.dot(p) - offset;
  }
};

Plane fit_plane(std::span<const Point3> points);

}  // namespace splitpack
