#include "splitpack/mbb.hpp"

#include "splitpack/convex_hull.hpp"
#include "splitpack/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace splitpack {

namespace {

constexpr std::size_t kMaxFaceFrames = 64;
constexpr double kInitialStep = 0.05;  // radians

double rotation_angle(const Mat3& frame) {
  const double c = std::clamp((frame.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Mat3 orthonormal_frame_from_normal(const Vec3& n) {
  const Vec3 w = n.normalized();
  const Vec3 helper =
      std::abs(w.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = helper.cross(w).normalized();
  const Vec3 v = w.cross(u);
  Mat3 m;
  m.row(0) = u.transpose();
  m.row(1) = v.transpose();
  m.row(2) = w.transpose();
  return m;
}

/// Frame whose third axis is `normal` and whose first two axes bound the
/// projected points with minimum area.
Mat3 face_frame(std::span<const Point3> points, const Vec3& normal) {
  const Mat3 base = orthonormal_frame_from_normal(normal);
  std::vector<Vec2> flat;
  flat.reserve(points.size());
  for (const auto& p : points)
    flat.emplace_back(base.row(0).dot(p), base.row(1).dot(p));
  const std::vector<int> idx = convex_hull_2d(flat);
  std::vector<Vec2> polygon;
  polygon.reserve(idx.size());
  for (int i : idx) polygon.push_back(flat[i]);
  const Rectangle2 rect = min_area_rectangle(polygon);
  const Vec3 u = (rect.u.x() * base.row(0) + rect.u.y() * base.row(1))
                     .transpose()
                     .normalized();
  const Vec3 w = base.row(2).transpose();
  const Vec3 v = w.cross(u);
  Mat3 m;
  m.row(0) = u.transpose();
  m.row(1) = v.transpose();
  m.row(2) = w.transpose();
  return m;
}

/// The 24 proper rotations permuting and flipping coordinate axes.
const std::array<Mat3, 24>& axis_symmetries() {
  static const std::array<Mat3, 24> table = [] {
    std::array<Mat3, 24> out;
    int k = 0;
    std::array<int, 3> perm{0, 1, 2};
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Mat3 m = Mat3::Zero();
        for (int r = 0; r < 3; ++r)
          m(r, perm[r]) = (signs >> r) & 1 ? -1.0 : 1.0;
        if (m.determinant() > 0) out[k++] = m;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return table;
}

struct Candidate {
  Mat3 frame;
  double volume;
  double angle;
};

bool better(const Candidate& a, const Candidate& b) {
  const double tol = 1e-12 * std::max(std::abs(a.volume), std::abs(b.volume));
  if (a.volume < b.volume - tol) return true;
  if (b.volume < a.volume - tol) return false;
  return a.angle < b.angle - 1e-12;
}

Candidate make_candidate(std::span<const Point3> pts, const Mat3& frame) {
  // Canonical representative among the box-preserving variants.
  Mat3 best = frame;
  double best_trace = -4.0;
  for (const Mat3& s : axis_symmetries()) {
    const Mat3 f = s * frame;
    const double t = f.trace();
    if (t > best_trace + 1e-12) {
      best_trace = t;
      best = f;
    }
  }
  return {best, frame_aabb_volume(pts, best), rotation_angle(best)};
}

Mat3 axis_rotation(int axis, double radians) {
  return Eigen::AngleAxisd(radians, Vec3::Unit(axis)).toRotationMatrix();
}

Candidate refine(std::span<const Point3> pts, Candidate start,
                 double min_step) {
  Candidate cur = start;
  for (double step = kInitialStep; step >= min_step * 0.999; step *= 0.5) {
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 64) {
      improved = false;
      for (int axis = 0; axis < 3; ++axis) {
        for (double sign : {1.0, -1.0}) {
          const Mat3 f = axis_rotation(axis, sign * step) * cur.frame;
          const double vol = frame_aabb_volume(pts, f);
          if (vol < cur.volume * (1.0 - 1e-12)) {
            cur.frame = f;
            cur.volume = vol;
            improved = true;
          }
        }
      }
    }
  }
  // Re-orthonormalize accumulated rotations.
  Eigen::JacobiSVD<Mat3> svd(cur.frame,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) r.row(2) = -r.row(2);
  return make_candidate(pts, r);
}

}  // namespace

double frame_aabb_volume(std::span<const Point3> points, const Mat3& frame) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& p : points) {
    const Vec3 q = frame * p;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  return (hi - lo).prod();
}

OrientedBox box_in_frame(std::span<const Point3> points, const Mat3& frame) {
  OrientedBox box;
  for (int i = 0; i < 3; ++i) box.axes[i] = frame.row(i).transpose();
  if (points.empty()) return box;
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& p : points) {
    const Vec3 q = frame * p;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  box.half_extents = 0.5 * (hi - lo);
  box.center = frame.transpose() * (0.5 * (hi + lo));
  return box;
}

OrientedBox approximate_mbb(std::span<const Point3> points, double epsilon) {
  if (points.empty()) return {};
  const double min_step = std::max(1e-4, 0.25 * epsilon);

  ConvexHull hull;
  bool solid = true;
  try {
    hull = convex_hull(points);
  } catch (const DegenerateInput&) {
    solid = false;
  }

  if (!solid) {
    const std::vector<Point3> ext = hull_vertices(points);
    const PrincipalFrame pf = principal_frame(ext);
    Mat3 frame = pf.axes.transpose();
    if (ext.size() >= 3) frame = face_frame(ext, pf.axes.col(2));
    return box_in_frame(points, make_candidate(ext, frame).frame);
  }

  const std::span<const Point3> pts(hull.vertices);

  std::vector<Candidate> candidates;
  candidates.push_back(make_candidate(pts, Mat3::Identity()));
  candidates.push_back(
      make_candidate(pts, principal_frame(pts).axes.transpose()));

  // Face normals, largest faces first, deduplicated up to sign.
  std::vector<std::size_t> order(hull.faces.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> area(hull.faces.size());
  for (std::size_t f = 0; f < hull.faces.size(); ++f)
    area[f] = hull.face_area(f);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return area[a] > area[b]; });
  std::vector<Vec3> normals;
  for (std::size_t f : order) {
    if (area[f] <= 0) continue;
    const Vec3 n = hull.face_normal(f);
    const bool seen = std::any_of(normals.begin(), normals.end(), [&](const Vec3& m) {
      return std::abs(m.dot(n)) > 1.0 - 1e-9;
    });
    if (seen) continue;
    normals.push_back(n);
    if (normals.size() >= kMaxFaceFrames) break;
  }
  for (const Vec3& n : normals)
    candidates.push_back(make_candidate(pts, face_frame(pts, n)));

  std::stable_sort(candidates.begin(), candidates.end(), better);
  Candidate best = candidates.front();
  // Refine the few best distinct starting frames.
  const std::size_t starts = std::min<std::size_t>(3, candidates.size());
  for (std::size_t i = 0; i < starts; ++i) {
    const Candidate c = refine(pts, candidates[i], min_step);
    if (better(c, best)) best = c;
  }
  return box_in_frame(points, best.frame);
}

RigidTransform axis_align(const OrientedBox& box) {
  const Mat3 frame = box.frame();
  RigidTransform t;
  t.rotation = UnitQuaternion::from_matrix(frame);
  t.translation = -(t.rotation.rotate(box.center));
  return t;
}

RigidTransform axis_align(std::span<const Point3> points, double epsilon) {
  return axis_align(approximate_mbb(points, epsilon));
}

}  // namespace splitpack
