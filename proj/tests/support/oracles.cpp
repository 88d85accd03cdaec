#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace oracles {

double grid_mbb_volume(std::span<const Point3> points, double step_deg) {
  const double step = step_deg * std::numbers::pi / 180.0;
  const int na = static_cast<int>(std::round(180.0 / step_deg));
  const int nb = na + 1;
  const int nc = 2 * na;
  double best = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia < na; ++ia)
    for (int ib = 0; ib < nb; ++ib)
      for (int ic = 0; ic < nc; ++ic) {
        const Mat3 r = (Eigen::AngleAxisd(ia * step, Vec3::UnitZ()) *
                        Eigen::AngleAxisd(ib * step, Vec3::UnitY()) *
                        Eigen::AngleAxisd(ic * step, Vec3::UnitZ()))
                           .toRotationMatrix();
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (const Point3& p : points) {
          const Vec3 q = r * p;
          lo = lo.cwiseMin(q);
          hi = hi.cwiseMax(q);
        }
        best = std::min(best, (hi - lo).prod());
      }
  return best;
}

double monte_carlo_tet_volume(const Point3& a, const Point3& b, const Point3& c,
                              const Point3& d, std::size_t samples,
                              std::mt19937_64& rng) {
  Vec3 lo = a.cwiseMin(b).cwiseMin(c).cwiseMin(d);
  Vec3 hi = a.cwiseMax(b).cwiseMax(c).cwiseMax(d);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat3 m;
  m << b - a, c - a, d - a;
  const Mat3 inv = m.inverse();
  std::size_t in = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point3 p = lo + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(hi - lo);
    const Vec3 l = inv * (p - a);
    if (l.minCoeff() >= 0 && l.sum() <= 1) ++in;
  }
  return (hi - lo).prod() * static_cast<double>(in) / static_cast<double>(samples);
}

std::size_t count_shared_facets(const TetMesh& mesh) {
  std::size_t count = 0;
  const auto& tets = mesh.tets();
  for (std::size_t i = 0; i < tets.size(); ++i)
    for (std::size_t j = i + 1; j < tets.size(); ++j) {
      int shared = 0;
      for (auto u : tets[i])
        for (auto v : tets[j]) shared += u == v;
      count += shared == 3;
    }
  return count;
}

std::vector<Triangle> boundary_facets(const TetMesh& mesh,
                                      std::span<const TetIndex> tets) {
  std::map<Triangle, int> seen;
  for (TetIndex t : tets) {
    const Tet& v = mesh.tets()[t];
    for (int skip = 0; skip < 4; ++skip) {
      Triangle f;
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) f[k++] = v[i];
      std::sort(f.begin(), f.end());
      ++seen[f];
    }
  }
  std::vector<Triangle> out;
  for (const auto& [f, n] : seen)
    if (n == 1) out.push_back(f);
  return out;
}

std::vector<int> classify(const VoxelGrid& grid) {
  const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  std::vector<int> out(static_cast<std::size_t>(nx) * ny * nz);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        int c = 2;
        if (!grid.is_free(x, y, z)) {
          c = 0;
        } else {
          for (int above = z + 1; above < nz; ++above)
            if (!grid.is_free(x, y, above)) c = 1;
        }
        out[x + static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z)] = c;
      }
  return out;
}

std::vector<std::int64_t> hole_region_sizes(const VoxelGrid& grid) {
  const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  std::vector<int> cls = classify(grid);
  auto at = [&](int x, int y, int z) {
    return x + static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z);
  };
  std::vector<std::int64_t> sizes;
  std::vector<std::array<int, 3>> queue;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (cls[at(x, y, z)] != 1) continue;
        std::int64_t size = 0;
        queue = {{x, y, z}};
        cls[at(x, y, z)] = -1;
        while (!queue.empty()) {
          auto [a, b, c] = queue.back();
          queue.pop_back();
          ++size;
          const int d[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
          for (const auto& s : d) {
            const int u = a + s[0], v = b + s[1], w = c + s[2];
            if (u < 0 || v < 0 || w < 0 || u >= nx || v >= ny || w >= nz) continue;
            if (cls[at(u, v, w)] != 1) continue;
            cls[at(u, v, w)] = -1;
            queue.push_back({u, v, w});
          }
        }
        sizes.push_back(size);
      }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::vector<Voxel> rasterize(std::span<const std::array<Point3, 4>> tets,
                             const Point3& origin, double s,
                             const std::array<int, 3>& dims) {
  std::vector<Voxel> out;
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y)
      for (int x = 0; x < dims[0]; ++x) {
        const Point3 p = origin + s * Point3(x + 0.5, y + 0.5, z + 0.5);
        for (const auto& t : tets) {
          Mat3 m;
          m << t[1] - t[0], t[2] - t[0], t[3] - t[0];
          const Vec3 l = m.inverse() * (p - t[0]);
          if (l.minCoeff() >= -1e-9 && l.sum() <= 1 + 1e-9) {
            out.push_back({x, y, z});
            break;
          }
        }
      }
  return out;
}

OracleChoice min_surface_cost(std::span<const VoxelTemplate> templates,
                              const VoxelGrid& grid) {
  const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  std::vector<int> height(static_cast<std::size_t>(nx) * ny, 0);
  int h = 0;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      for (int z = 0; z < nz; ++z)
        if (!grid.is_free(x, y, z)) {
          height[y * nx + x] = z + 1;
          h = std::max(h, z + 1);
        }
  const std::int64_t volume = static_cast<std::int64_t>(nx) * ny * nz;

  OracleChoice best;
  for (const VoxelTemplate& t : templates) {
    const std::vector<Voxel> voxels = t.voxels();
    for (int oz = 0; oz + t.dims[2] <= nz; ++oz)
      for (int oy = 0; oy + t.dims[1] <= ny; ++oy)
        for (int ox = 0; ox + t.dims[0] <= nx; ++ox) {
          bool ok = true;
          int top = 0;
          std::map<std::pair<int, int>, int> lowest;
          for (const Voxel& v : voxels) {
            const int x = ox + v[0], y = oy + v[1], z = oz + v[2];
            if (!grid.is_free(x, y, z) || z < height[y * nx + x]) {
              ok = false;
              break;
            }
            top = std::max(top, z + 1);
            auto [it, inserted] = lowest.try_emplace({x, y}, z);
            if (!inserted) it->second = std::min(it->second, z);
          }
          if (!ok) continue;
          std::int64_t u = 0;
          for (const auto& [xy, z] : lowest)
            u += std::max(0, z - height[xy.second * nx + xy.first]);
          const std::int64_t cost = std::max(0, top - h) * volume + u;
          if (!best.found || cost < best.cost) best = {true, cost};
        }
  }
  return best;
}

Vec3 triangle_normal(const Point3& a, const Point3& b, const Point3& c) {
  return (b - a).cross(c - a).normalized();
}

bool direction_scan_heightfield(std::span<const Vec3> normals,
                                std::size_t directions) {
  // Fibonacci sphere.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < directions; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                               static_cast<double>(directions);
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 d(r * std::cos(golden * i), r * std::sin(golden * i), z);
    bool all = true;
    for (const Vec3& n : normals)
      if (n.dot(d) < 0) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

double orthant_chi_square(std::span<const UnitQuaternion> q) {
  std::array<double, 16> counts{};
  for (const UnitQuaternion& v : q) {
    const int cell = (v.w() < 0) | (v.x() < 0) << 1 | (v.y() < 0) << 2 | (v.z() < 0) << 3;
    ++counts[cell];
  }
  const double expected = static_cast<double>(q.size()) / 16.0;
  double chi = 0;
  for (double c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

}  // namespace oracles
