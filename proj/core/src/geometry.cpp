#include "splitpack/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace splitpack {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n > 0.0 && std::isfinite(n)) {
    w_ = w / n;
    x_ = x / n;
    y_ = y / n;
    z_ = z / n;
  }
}

UnitQuaternion UnitQuaternion::raw(double w, double x, double y, double z) {
  UnitQuaternion q;
  q.w_ = w;
  q.x_ = x;
  q.y_ = y;
  q.z_ = z;
  return q;
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& rotation) {
  const Eigen::Quaterniond q(rotation);
  return {q.w(), q.x(), q.y(), q.z()};
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis,
                                               double radians) {
  const Vec3 a = axis.normalized();
  const double s = std::sin(0.5 * radians);
  return {std::cos(0.5 * radians), a.x() * s, a.y() * s, a.z() * s};
}

Mat3 UnitQuaternion::matrix() const {
  return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  // v + 2 u x (u x v + w v)
  const Vec3 u(x_, y_, z_);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

double UnitQuaternion::norm() const {
  return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
}

double UnitQuaternion::angle() const {
  const double v = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
  return 2.0 * std::atan2(v, std::abs(w_));
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
          a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
          a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
          a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_};
}

RigidTransform RigidTransform::inverse() const {
  const UnitQuaternion inv = rotation.conjugate();
  return {inv, -inv.rotate(translation)};
}

RigidTransform RigidTransform::after(const RigidTransform& first) const {
  return {rotation * first.rotation,
          rotation.rotate(first.translation) + translation};
}

RigidTransform compose(const RigidTransform& second,
                       const RigidTransform& first) {
  return second.after(first);
}

Mat3 OrientedBox::frame() const {
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.row(i) = axes[i].transpose();
  return m;
}

bool OrientedBox::contains(const Point3& p, double tolerance) const {
  const Vec3 d = p - center;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axes[i].dot(d)) > half_extents[i] + tolerance) return false;
  }
  return true;
}

std::array<Point3, 8> OrientedBox::corners() const {
  std::array<Point3, 8> out;
  for (int i = 0; i < 8; ++i) {
    Point3 p = center;
    for (int a = 0; a < 3; ++a) {
      const double sign = (i >> a) & 1 ? 1.0 : -1.0;
      p += sign * half_extents[a] * axes[a];
    }
    out[i] = p;
  }
  return out;
}

Aabb bounding_box(std::span<const Point3> points) {
  Aabb box;
  for (const auto& p : points) box.extend(p);
  return box;
}

double signed_tet_volume(const Point3& a, const Point3& b, const Point3& c,
                         const Point3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double tet_volume(const Point3& a, const Point3& b, const Point3& c,
                  const Point3& d) {
  return std::abs(signed_tet_volume(a, b, c, d));
}

bool point_in_tet(const Point3& p, const Point3& a, const Point3& b,
                  const Point3& c, const Point3& d, double tolerance) {
  const double total = signed_tet_volume(a, b, c, d);
  if (total == 0.0) return false;
  const double scale = std::abs(total) * tolerance;
  const double s = total > 0 ? 1.0 : -1.0;
  return s * signed_tet_volume(p, b, c, d) >= -scale &&
         s * signed_tet_volume(a, p, c, d) >= -scale &&
         s * signed_tet_volume(a, b, p, d) >= -scale &&
         s * signed_tet_volume(a, b, c, p) >= -scale;
}

PrincipalFrame principal_frame(std::span<const Point3> points) {
  PrincipalFrame frame;
  if (points.empty()) return frame;
  Point3 c = Point3::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - c;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());
  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  // Eigen sorts ascending; flip to descending.
  Mat3 axes;
  Vec3 values;
  for (int i = 0; i < 3; ++i) {
    axes.col(i) = solver.eigenvectors().col(2 - i);
    values[i] = solver.eigenvalues()[2 - i];
  }
  if (axes.determinant() < 0) axes.col(2) = -axes.col(2);
  frame.centroid = c;
  frame.axes = axes;
  frame.eigenvalues = values;
  return frame;
}

Plane fit_plane(std::span<const Point3> points) {
  const PrincipalFrame pf = principal_frame(points);
  Plane plane;
  plane.normal = pf.axes.col(2).normalized();
  plane.offset = plane.normal.dot(pf.centroid);
  return plane;
}

}  // namespace splitpack
