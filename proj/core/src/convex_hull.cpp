#include "splitpack/convex_hull.hpp"

#include "splitpack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace splitpack {

namespace {

struct Face {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  bool alive = true;
  int visit_mark = -1;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

class HullBuilder {
 public:
  HullBuilder(std::span<const Point3> points, double eps)
      : pts_(points), eps_(eps) {}

  void add_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = n.norm();
    f.normal = len > 0 ? Vec3(n / len) : Vec3::Zero();
    f.offset = f.normal.dot(pts_[a]);
    const int id = static_cast<int>(faces_.size());
    faces_.push_back(f);
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
  }

  double distance(const Face& f, const Point3& p) const {
    return f.normal.dot(p) - f.offset;
  }

  void init(int i0, int i1, int i2, int i3) {
    // Orient so that i3 lies behind face (i0, i1, i2).
    if (signed_tet_volume(pts_[i0], pts_[i1], pts_[i2], pts_[i3]) > 0)
      std::swap(i1, i2);
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);
  }

  void insert(int pi, int pass) {
    const Point3& p = pts_[pi];
    int best = -1;
    double best_d = eps_;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (!faces_[f].alive) continue;
      const double d = distance(faces_[f], p);
      if (d > best_d) {
        best_d = d;
        best = f;
      }
    }
    if (best < 0) return;

    std::vector<int> visible{best};
    faces_[best].visit_mark = pass;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const Face& f = faces_[visible[k]];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        auto it = edges_.find(edge_key(b, a));
        if (it == edges_.end()) continue;
        Face& g = faces_[it->second];
        if (!g.alive || g.visit_mark == pass) continue;
        if (distance(g, p) > eps_) {
          g.visit_mark = pass;
          visible.push_back(it->second);
        }
      }
    }

    std::vector<std::pair<int, int>> horizon;
    for (int fi : visible) {
      const Face& f = faces_[fi];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        auto it = edges_.find(edge_key(b, a));
        if (it == edges_.end() || faces_[it->second].visit_mark != pass)
          horizon.emplace_back(a, b);
      }
    }
    for (int fi : visible) {
      Face& f = faces_[fi];
      f.alive = false;
      for (int e = 0; e < 3; ++e) {
        auto it = edges_.find(edge_key(f.v[e], f.v[(e + 1) % 3]));
        if (it != edges_.end() && it->second == fi) edges_.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) add_face(a, b, pi);
  }

  ConvexHull result() const {
    ConvexHull hull;
    std::vector<int> remap(pts_.size(), -1);
    for (const Face& f : faces_) {
      if (!f.alive) continue;
      std::array<int, 3> tri;
      for (int e = 0; e < 3; ++e) {
        int& r = remap[f.v[e]];
        if (r < 0) {
          r = static_cast<int>(hull.vertices.size());
          hull.vertices.push_back(pts_[f.v[e]]);
        }
        tri[e] = r;
      }
      hull.faces.push_back(tri);
    }
    return hull;
  }

 private:
  std::span<const Point3> pts_;
  double eps_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, int> edges_;
};

double scale_of(std::span<const Point3> points) {
  const Aabb box = bounding_box(points);
  return std::max(box.extents().norm(), 1e-300);
}

int farthest_from_line(std::span<const Point3> pts, const Point3& a,
                       const Point3& b, double* dist) {
  const Vec3 dir = (b - a).normalized();
  int best = -1;
  double best_d = -1;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const Vec3 d = pts[i] - a;
    const double dd = (d - dir * dir.dot(d)).norm();
    if (dd > best_d) {
      best_d = dd;
      best = i;
    }
  }
  *dist = best_d;
  return best;
}

int farthest_from_plane(std::span<const Point3> pts, const Point3& a,
                        const Vec3& normal, double* dist) {
  int best = -1;
  double best_d = -1;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double dd = std::abs(normal.dot(pts[i] - a));
    if (dd > best_d) {
      best_d = dd;
      best = i;
    }
  }
  *dist = best_d;
  return best;
}

std::pair<int, int> most_distant_extremes(std::span<const Point3> pts) {
  std::array<int, 6> ext{0, 0, 0, 0, 0, 0};
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (pts[i][a] < pts[ext[2 * a]][a]) ext[2 * a] = i;
      if (pts[i][a] > pts[ext[2 * a + 1]][a]) ext[2 * a + 1] = i;
    }
  }
  std::pair<int, int> best{0, 0};
  double best_d = -1;
  for (int a = 0; a < 3; ++a) {
    const double d = (pts[ext[2 * a + 1]] - pts[ext[2 * a]]).norm();
    if (d > best_d) {
      best_d = d;
      best = {ext[2 * a], ext[2 * a + 1]};
    }
  }
  return best;
}

}  // namespace

double ConvexHull::volume() const {
  if (vertices.empty()) return 0.0;
  Point3 c = Point3::Zero();
  for (const auto& v : vertices) c += v;
  c /= static_cast<double>(vertices.size());
  double vol = 0;
  for (const auto& f : faces)
    vol += signed_tet_volume(c, vertices[f[0]], vertices[f[1]], vertices[f[2]]);
  return vol;
}

Vec3 ConvexHull::face_normal(std::size_t face) const {
  const auto& f = faces[face];
  return (vertices[f[1]] - vertices[f[0]])
      .cross(vertices[f[2]] - vertices[f[0]])
      .normalized();
}

double ConvexHull::face_area(std::size_t face) const {
  const auto& f = faces[face];
  return 0.5 * (vertices[f[1]] - vertices[f[0]])
                   .cross(vertices[f[2]] - vertices[f[0]])
                   .norm();
}

ConvexHull convex_hull(std::span<const Point3> points) {
  if (points.size() < 4)
    throw DegenerateInput("convex hull needs at least 4 points");
  const double scale = scale_of(points);
  const double eps = 1e-11 * scale;

  const auto [i0, i1] = most_distant_extremes(points);
  if ((points[i1] - points[i0]).norm() <= eps)
    throw DegenerateInput("points are coincident");
  double d = 0;
  const int i2 = farthest_from_line(points, points[i0], points[i1], &d);
  if (d <= 1e-9 * scale) throw DegenerateInput("points are collinear");
  const Vec3 n =
      (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  const int i3 = farthest_from_plane(points, points[i0], n, &d);
  if (d <= 1e-9 * scale) throw DegenerateInput("points are coplanar");

  HullBuilder builder(points, eps);
  builder.init(i0, i1, i2, i3);

  // Far points first keeps the intermediate hulls small.
  const Point3 c = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    dist[i] = (points[i] - c).squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dist[a] > dist[b]; });
  int pass = 0;
  for (int i : order) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    builder.insert(i, pass++);
  }
  return builder.result();
}

std::vector<int> convex_hull_2d(std::span<const Vec2> points) {
  const int n = static_cast<int>(points.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
    if (points[a].y() != points[b].y()) return points[a].y() < points[b].y();
    return a < b;
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](int a, int b) { return points[a] == points[b]; }),
            idx.end());
  if (idx.size() < 3) return idx;
  auto cross = [&](int o, int a, int b) {
    const Vec2 u = points[a] - points[o], v = points[b] - points[o];
    return u.x() * v.y() - u.y() * v.x();
  };
  double extent = 0;
  for (int i : idx) extent = std::max(extent, points[i].cwiseAbs().maxCoeff());
  const double eps = 1e-14 * std::max(extent * extent, 1e-300);
  std::vector<int> hull(2 * idx.size());
  int k = 0;
  for (int i : idx) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= eps) --k;
    hull[k++] = i;
  }
  for (int j = static_cast<int>(idx.size()) - 2, t = k + 1; j >= 0; --j) {
    const int i = idx[j];
    while (k >= t && cross(hull[k - 2], hull[k - 1], i) <= eps) --k;
    hull[k++] = i;
  }
  hull.resize(k - 1);
  return hull;
}

Rectangle2 min_area_rectangle(std::span<const Vec2> polygon) {
  Rectangle2 best;
  const int n = static_cast<int>(polygon.size());
  if (n == 0) return best;
  if (n == 1) {
    best.min = best.max = polygon[0];
    return best;
  }
  auto rect_for = [&](const Vec2& u) {
    const Vec2 v(-u.y(), u.x());
    Rectangle2 r;
    r.u = u;
    r.min = Vec2::Constant(std::numeric_limits<double>::infinity());
    r.max = -r.min;
    for (const auto& p : polygon) {
      const Vec2 q(u.dot(p), v.dot(p));
      r.min = r.min.cwiseMin(q);
      r.max = r.max.cwiseMax(q);
    }
    return r;
  };
  if (n == 2) return rect_for((polygon[1] - polygon[0]).normalized());

  // Rotating calipers over the edges of a CCW polygon. Pointers track the
  // vertices extreme along +u, -u and +v (inward normal).
  auto proj = [&](int i, const Vec2& d) { return d.dot(polygon[i % n]); };
  double best_area = std::numeric_limits<double>::infinity();
  int right = 0, top = 0, left = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 e = polygon[(i + 1) % n] - polygon[i];
    const double len = e.norm();
    if (len == 0) continue;
    const Vec2 u = e / len;
    const Vec2 v(-u.y(), u.x());
    if (i == 0) {
      right = top = left = i + 1;
      for (int j = 0; j < n; ++j) {
        if (proj(j, u) > proj(right, u)) right = j;
        if (proj(j, v) > proj(top, v)) top = j;
        if (proj(j, -u) > proj(left, -u)) left = j;
      }
    } else {
      while (proj(right + 1, u) > proj(right, u)) ++right;
      while (proj(top + 1, v) > proj(top, v)) ++top;
      while (proj(left + 1, -u) > proj(left, -u)) ++left;
      right %= n;
      top %= n;
      left %= n;
    }
    const double w = proj(right, u) - proj(left, u);
    const double h = proj(top, v) - v.dot(polygon[i]);
    const double area = w * h;
    if (area < best_area) {
      best_area = area;
      best.u = u;
      best.min = Vec2(proj(left, u), v.dot(polygon[i]));
      best.max = Vec2(proj(right, u), proj(top, v));
    }
  }
  return best;
}

std::vector<Point3> hull_vertices(std::span<const Point3> points) {
  if (points.empty()) return {};
  try {
    return convex_hull(points).vertices;
  } catch (const DegenerateInput&) {
  }
  const PrincipalFrame pf = principal_frame(points);
  const Vec3 u = pf.axes.col(0), v = pf.axes.col(1);
  std::vector<Vec2> flat;
  flat.reserve(points.size());
  for (const auto& p : points) {
    const Vec3 d = p - pf.centroid;
    flat.emplace_back(u.dot(d), v.dot(d));
  }
  const std::vector<int> idx = convex_hull_2d(flat);
  std::vector<Point3> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(points[i]);
  return out;
}

}  // namespace splitpack
