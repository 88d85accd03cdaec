#include "surfaces.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace surfaces {
namespace {

using Grid = std::vector<std::vector<Point3>>;

// Two triangles per quad of a (u, v) point grid, normals (p_u x p_v).
std::vector<Vec3> quad_normals(const Grid& g) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    for (std::size_t j = 0; j + 1 < g[i].size(); ++j) {
      const Point3 &a = g[i][j], &b = g[i + 1][j], &c = g[i + 1][j + 1], &d = g[i][j + 1];
      for (const Vec3& n : {(b - a).cross(c - a), (c - a).cross(d - a)})
        if (n.norm() > 1e-12) out.push_back(n.normalized());
    }
  return out;
}

Grid sample(int nu, int nv, const std::function<Point3(double, double)>& f) {
  Grid g(nu + 1, std::vector<Point3>(nv + 1));
  for (int i = 0; i <= nu; ++i)
    for (int j = 0; j <= nv; ++j) g[i][j] = f(double(i) / nu, double(j) / nv);
  return g;
}

Surface graph(const std::string& name, const std::function<double(double, double)>& z) {
  return {name, quad_normals(sample(24, 24, [&](double u, double v) {
            return Point3(u, v, z(u, v));
          }))};
}

// Profile (x(t), z(t)) in the xz-plane extruded along y over [0, 1].
std::vector<Vec3> extrusion(const std::vector<std::array<double, 2>>& profile) {
  Grid g(profile.size(), std::vector<Point3>(2));
  for (std::size_t i = 0; i < profile.size(); ++i)
    for (int j = 0; j < 2; ++j) g[i][j] = Point3(profile[i][0], j, profile[i][1]);
  return quad_normals(g);
}

Surface cap(double angle_deg) {
  const double theta = angle_deg * std::numbers::pi / 180.0;
  return {"spherical cap " + std::to_string(static_cast<int>(angle_deg)),
          quad_normals(sample(16, 32, [&](double u, double v) {
            const double t = theta * (0.02 + 0.98 * u), p = 2 * std::numbers::pi * v;
            return Point3(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p),
                          std::cos(t));
          }))};
}

}  // namespace

std::vector<Surface> split_surface_suite() {
  std::vector<Surface> out;
  out.push_back(graph("plane", [](double, double) { return 0.0; }));
  out.push_back(graph("tilted plane", [](double u, double v) { return 0.7 * u - 2.0 * v; }));
  out.push_back(graph("wavy", [](double u, double v) {
    return 0.05 * std::sin(6 * u) * std::cos(5 * v);
  }));
  out.push_back(graph("steep wavy", [](double u, double v) {
    return 0.4 * std::sin(9 * u) + 0.3 * std::cos(7 * v);
  }));
  out.push_back({"sawtooth", extrusion({{0, 0}, {0.3, 0.5}, {0.31, 0}, {0.6, 0.5},
                                        {0.61, 0}, {0.9, 0.5}})});
  // Dovetail: a neck undercut on both sides, closed at the ends of the
  // extrusion so the tenon cannot slide out sideways.
  {
    auto n = extrusion({{0, 0}, {1, 0}, {0.8, 1}, {2.2, 1}, {2, 0}, {3, 0}});
    n.push_back(Vec3::UnitY());
    n.push_back(-Vec3::UnitY());
    out.push_back({"dovetail", n});
  }
  // Single undercut: slides out at an angle.
  out.push_back({"half dovetail", extrusion({{0, 0}, {1, 0}, {0.8, 1}, {2.2, 1}})});
  out.push_back(cap(60));
  out.push_back(cap(85));
  out.push_back(cap(120));
  out.push_back(cap(170));
  // Tapered peg: separates along its axis.
  out.push_back({"tapered peg", quad_normals(sample(8, 32, [](double u, double v) {
                   const double p = 2 * std::numbers::pi * v, r = 1.0 - 0.3 * u;
                   return Point3(r * std::cos(p), r * std::sin(p), u);
                 }))});
  // Barrel: bulges both ways, trapped.
  out.push_back({"barrel", quad_normals(sample(8, 32, [](double u, double v) {
                   const double p = 2 * std::numbers::pi * v,
                                r = 1.0 + 0.3 * std::sin(std::numbers::pi * u);
                   return Point3(r * std::cos(p), r * std::sin(p), u);
                 }))});
  return out;
}

}  // namespace surfaces
