#include "splitpack/voxel_grid.hpp"

#include "splitpack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace splitpack {
namespace {

// Relative slack (in voxels) on point-in-tet and range tests.
constexpr double kTol = 1e-9;

struct TetPlanes {
  std::array<Vec3, 4> normal;
  std::array<double, 4> offset;  // inside: normal . p + offset >= 0
  Point3 lo, hi;
};

TetPlanes make_planes(const TetPoints& p) {
  static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  TetPlanes tp;
  for (int f = 0; f < 4; ++f) {
    const Point3& a = p[kFace[f][0]];
    Vec3 n = (p[kFace[f][1]] - a).cross(p[kFace[f][2]] - a);
    const double len = n.norm();
    if (len > 0) n /= len;
    double d = -n.dot(a);
    if (n.dot(p[f]) + d < 0) {
      n = -n;
      d = -d;
    }
    tp.normal[f] = n;
    tp.offset[f] = d;
  }
  tp.lo = p[0].cwiseMin(p[1]).cwiseMin(p[2]).cwiseMin(p[3]);
  tp.hi = p[0].cwiseMax(p[1]).cwiseMax(p[2]).cwiseMax(p[3]);
  return tp;
}

// Calls emit(i, j, k_begin, k_end) for every run of voxel centers
// origin + (idx + 0.5) * s inside the tetrahedron, clipped to dims.
template <class Emit>
void scan_tet(const TetPlanes& tp, const Point3& origin, double s,
              const std::array<int, 3>& dims, Emit&& emit) {
  auto range = [&](double lo, double hi, double o, int n) {
    int a = static_cast<int>(std::ceil((lo - o) / s - 0.5 - kTol));
    int b = static_cast<int>(std::floor((hi - o) / s - 0.5 + kTol));
    return std::pair{std::max(a, 0), std::min(b, n - 1)};
  };
  const auto [i0, i1] = range(tp.lo.x(), tp.hi.x(), origin.x(), dims[0]);
  const auto [j0, j1] = range(tp.lo.y(), tp.hi.y(), origin.y(), dims[1]);
  const double tol = kTol * s;
  for (int j = j0; j <= j1; ++j) {
    const double y = origin.y() + (j + 0.5) * s;
    for (int i = i0; i <= i1; ++i) {
      const double x = origin.x() + (i + 0.5) * s;
      double zlo = tp.lo.z() - tol, zhi = tp.hi.z() + tol;
      bool empty = false;
      for (int f = 0; f < 4 && !empty; ++f) {
        const Vec3& n = tp.normal[f];
        const double c = n.x() * x + n.y() * y + tp.offset[f];
        if (std::abs(n.z()) < 1e-14) {
          if (c < -tol) empty = true;
        } else if (n.z() > 0) {
          zlo = std::max(zlo, (-c - tol) / n.z());
        } else {
          zhi = std::min(zhi, (-c - tol) / n.z());
        }
      }
      if (empty || zlo > zhi) continue;
      const int k0 = std::max(
          0, static_cast<int>(std::ceil((zlo - origin.z()) / s - 0.5)));
      const int k1 = std::min(
          dims[2] - 1,
          static_cast<int>(std::floor((zhi - origin.z()) / s - 0.5)));
      if (k0 <= k1) emit(i, j, k0, k1 + 1);
    }
  }
}

}  // namespace

int HeightField::max() const {
  return height.empty() ? 0 : *std::max_element(height.begin(), height.end());
}

bool VoxelTemplate::occupied(int i, int j, int k) const {
  if (i < 0 || j < 0 || i >= dims[0] || j >= dims[1]) return false;
  const std::size_t c = column(i, j);
  for (auto s = interval_start[c]; s < interval_start[c + 1]; ++s)
    if (k >= intervals[s].begin && k < intervals[s].end) return true;
  return false;
}

std::vector<Voxel> VoxelTemplate::voxels() const {
  std::vector<Voxel> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < dims[1]; ++j)
    for (int i = 0; i < dims[0]; ++i) {
      const std::size_t c = column(i, j);
      for (auto s = interval_start[c]; s < interval_start[c + 1]; ++s)
        for (int k = intervals[s].begin; k < intervals[s].end; ++k)
          out.push_back({i, j, k});
    }
  return out;
}

VoxelTemplate rasterize_template(std::span<const TetPoints> tets,
                                 double voxel_size) {
  if (tets.empty()) throw Error("cannot rasterize an empty part");
  if (!(voxel_size > 0)) throw Error("voxel size must be positive");
  const double s = voxel_size;

  Aabb box;
  Point3 centroid = Point3::Zero();
  double volume = 0;
  std::vector<TetPlanes> planes;
  planes.reserve(tets.size());
  for (const TetPoints& t : tets) {
    for (const Point3& p : t) box.extend(p);
    const double v = tet_volume(t[0], t[1], t[2], t[3]);
    centroid += v * (t[0] + t[1] + t[2] + t[3]) / 4.0;
    volume += v;
    planes.push_back(make_planes(t));
  }
  centroid = volume > 0 ? Point3(centroid / volume) : box.min;

  VoxelTemplate t;
  for (int a = 0; a < 3; ++a)
    t.dims[a] = std::max(
        1, static_cast<int>(std::ceil((box.max[a] - box.min[a]) / s - kTol)));
  t.min_corner = box.min;
  t.max_corner = box.max;
  const std::size_t columns = static_cast<std::size_t>(t.dims[0]) * t.dims[1];
  std::vector<std::uint8_t> dense(columns * t.dims[2], 0);
  auto cell = [&](int i, int j, int k) -> std::uint8_t& {
    return dense[(static_cast<std::size_t>(j) * t.dims[0] + i) * t.dims[2] + k];
  };
  for (const TetPlanes& tp : planes)
    scan_tet(tp, box.min, s, t.dims, [&](int i, int j, int k0, int k1) {
      for (int k = k0; k < k1; ++k) cell(i, j, k) = 1;
    });

  auto voxel_of = [&](const Point3& p) {
    Voxel v;
    for (int a = 0; a < 3; ++a)
      v[a] = std::clamp(static_cast<int>(std::floor((p[a] - box.min[a]) / s)),
                        0, t.dims[a] - 1);
    return v;
  };
  if (std::find(dense.begin(), dense.end(), 1) == dense.end()) {
    const Voxel v = voxel_of(centroid);
    cell(v[0], v[1], v[2]) = 1;
  }
  t.anchor = voxel_of(Point3::Zero());

  t.interval_start.assign(columns + 1, 0);
  t.bottom.assign(columns, -1);
  t.top.assign(columns, -1);
  for (int j = 0; j < t.dims[1]; ++j)
    for (int i = 0; i < t.dims[0]; ++i) {
      const std::size_t c = t.column(i, j);
      t.interval_start[c] = static_cast<std::uint32_t>(t.intervals.size());
      int k = 0;
      while (k < t.dims[2]) {
        if (!cell(i, j, k)) {
          ++k;
          continue;
        }
        const int begin = k;
        while (k < t.dims[2] && cell(i, j, k)) ++k;
        t.intervals.push_back({begin, k});
        t.count += k - begin;
        if (t.bottom[c] < 0) t.bottom[c] = begin;
        t.top[c] = k;
      }
      if (t.bottom[c] >= 0) {
        ++t.footprint;
        t.bottom_sum += t.bottom[c];
        t.occupied_top = std::max(t.occupied_top, t.top[c]);
      }
    }
  t.interval_start[columns] = static_cast<std::uint32_t>(t.intervals.size());

  for (int j = 0; j < t.dims[1]; ++j) {
    int i = 0;
    while (i < t.dims[0]) {
      if (t.bottom[t.column(i, j)] < 0) {
        ++i;
        continue;
      }
      const int start = i;
      while (i < t.dims[0] && t.bottom[t.column(i, j)] >= 0) ++i;
      t.row_runs.push_back({j, start, i - start, 0});
      int k = start;
      while (k < i) {
        const int b = t.bottom[t.column(k, j)];
        const int s0 = k;
        while (k < i && t.bottom[t.column(k, j)] == b) ++k;
        t.level_runs.push_back({j, s0, k - s0, b});
      }
    }
  }
  // Lowest bottoms first: those runs bound the resting height the most.
  std::stable_sort(t.level_runs.begin(), t.level_runs.end(),
                   [](const auto& a, const auto& b) {
                     return a.bottom != b.bottom ? a.bottom < b.bottom
                                                 : a.len > b.len;
                   });
  return t;
}

VoxelGrid::VoxelGrid(int nx, int ny, int nz, double voxel_size)
    : dims_{nx, ny, nz}, voxel_size_(voxel_size) {
  if (nx < 1 || ny < 1 || nz < 1) throw Error("grid dimensions must be >= 1");
  if (!(voxel_size > 0)) throw Error("voxel size must be positive");
  cells_.assign(static_cast<std::size_t>(volume()), 0);
  heightfield_.nx = nx;
  heightfield_.ny = ny;
  heightfield_.height.assign(static_cast<std::size_t>(nx) * ny, 0);
}

void VoxelGrid::set_owner(int x, int y, int z, std::uint16_t label) {
  cells_[index(x, y, z)] = label;
  int& h = heightfield_.height[static_cast<std::size_t>(y) * dims_[0] + x];
  if (label != 0) {
    h = std::max(h, z + 1);
  } else if (h == z + 1) {
    while (h > 0 && cells_[index(x, y, h - 1)] == 0) --h;
  }
  height_ = label != 0 ? std::max(height_, h) : heightfield_.max();
}

bool VoxelGrid::fits(const VoxelTemplate& t, const Voxel& o) const {
  for (int a = 0; a < 3; ++a)
    if (o[a] < 0 || o[a] + t.dims[a] > dims_[a]) return false;
  for (int j = 0; j < t.dims[1]; ++j)
    for (int i = 0; i < t.dims[0]; ++i) {
      const std::size_t c = t.column(i, j);
      const std::size_t base = index(o[0] + i, o[1] + j, o[2]);
      for (auto s = t.interval_start[c]; s < t.interval_start[c + 1]; ++s)
        for (int k = t.intervals[s].begin; k < t.intervals[s].end; ++k)
          if (cells_[base + k] != 0) return false;
    }
  return true;
}

void VoxelGrid::commit(const VoxelTemplate& t, const Voxel& o,
                       std::uint16_t label) {
  if (label == 0) throw Error("part label 0 is reserved for free voxels");
  if (!fits(t, o)) throw Error("committed template does not fit the grid");
  for (int j = 0; j < t.dims[1]; ++j)
    for (int i = 0; i < t.dims[0]; ++i) {
      const std::size_t c = t.column(i, j);
      if (t.top[c] < 0) continue;
      const std::size_t base = index(o[0] + i, o[1] + j, o[2]);
      for (auto s = t.interval_start[c]; s < t.interval_start[c + 1]; ++s)
        std::fill(cells_.begin() + base + t.intervals[s].begin,
                  cells_.begin() + base + t.intervals[s].end, label);
      int& h = heightfield_.height[static_cast<std::size_t>(o[1] + j) *
                                       dims_[0] +
                                   o[0] + i];
      h = std::max(h, o[2] + t.top[c]);
      height_ = std::max(height_, h);
    }
}

std::int64_t VoxelGrid::occupied_count() const {
  return static_cast<std::int64_t>(
      std::count_if(cells_.begin(), cells_.end(), [](auto v) { return v != 0; }));
}

HeightField compute_heightfield(const VoxelGrid& grid) {
  HeightField hf;
  hf.nx = grid.nx();
  hf.ny = grid.ny();
  hf.height.assign(static_cast<std::size_t>(hf.nx) * hf.ny, 0);
  for (int y = 0; y < grid.ny(); ++y)
    for (int x = 0; x < grid.nx(); ++x)
      for (int z = grid.nz() - 1; z >= 0; --z)
        if (!grid.is_free(x, y, z)) {
          hf.height[static_cast<std::size_t>(y) * hf.nx + x] = z + 1;
          break;
        }
  return hf;
}

int HoleLabels::region_at(int x, int y, int z) const {
  const std::size_t c = static_cast<std::size_t>(y) * nx + x;
  if (z < 0 || z >= height[c]) return -1;
  for (auto r = column_start[c]; r < column_start[c + 1]; ++r) {
    if (z < runs[r].begin) break;
    if (z < runs[r].end) return runs[r].region;
  }
  return -2;
}

bool HoleLabels::span_in_region(int x, int y, int begin, int end,
                                int region) const {
  const std::size_t c = static_cast<std::size_t>(y) * nx + x;
  for (auto r = column_start[c]; r < column_start[c + 1]; ++r) {
    if (begin < runs[r].begin) return false;
    if (begin < runs[r].end) return end <= runs[r].end && runs[r].region == region;
  }
  return false;
}

VoxelClass HoleLabels::classify(int x, int y, int z) const {
  const int r = region_at(x, y, z);
  return r == -2 ? VoxelClass::kOccupied
                 : (r >= 0 ? VoxelClass::kHole : VoxelClass::kSlot);
}

HoleLabels classify_free_voxels(const VoxelGrid& grid) {
  HoleLabels h;
  h.nx = grid.nx();
  h.ny = grid.ny();
  const HeightField& hf = grid.heightfield();
  const std::size_t columns = static_cast<std::size_t>(h.nx) * h.ny;
  h.height = hf.height;
  h.column_start.assign(columns + 1, 0);
  for (std::size_t c = 0; c < columns; ++c) {
    const int x = static_cast<int>(c % h.nx), y = static_cast<int>(c / h.nx);
    const std::uint16_t* cells = grid.column(x, y);
    for (int z = 0; z < hf.height[c];) {
      if (cells[z]) {
        ++z;
        continue;
      }
      const int begin = z;
      while (z < hf.height[c] && !cells[z]) ++z;
      h.runs.push_back({begin, z, static_cast<int>(h.runs.size())});
    }
    h.column_start[c + 1] = static_cast<std::uint32_t>(h.runs.size());
  }

  // Union-find over runs; runs of neighbouring columns touch when their
  // intervals overlap.
  std::vector<int> parent(h.runs.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto join = [&](std::size_t c, std::size_t d) {
    auto i = h.column_start[c], j = h.column_start[d];
    while (i < h.column_start[c + 1] && j < h.column_start[d + 1]) {
      const auto& a = h.runs[i];
      const auto& b = h.runs[j];
      if (a.begin < b.end && b.begin < a.end) {
        const int ra = find(static_cast<int>(i)), rb = find(static_cast<int>(j));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
      if (a.end < b.end) ++i; else ++j;
    }
  };
  for (int y = 0; y < h.ny; ++y)
    for (int x = 0; x < h.nx; ++x) {
      const std::size_t c = static_cast<std::size_t>(y) * h.nx + x;
      if (x + 1 < h.nx) join(c, c + 1);
      if (y + 1 < h.ny) join(c, c + h.nx);
    }

  // Regions numbered by their first run in (y, x, z) order.
  std::vector<int> id(h.runs.size(), -1);
  for (std::size_t c = 0; c < columns; ++c) {
    const int x = static_cast<int>(c % h.nx), y = static_cast<int>(c / h.nx);
    for (auto r = h.column_start[c]; r < h.column_start[c + 1]; ++r) {
      HoleLabels::Run& run = h.runs[r];
      int& rid = id[find(static_cast<int>(r))];
      if (rid < 0) {
        rid = static_cast<int>(h.regions.size());
        HoleRegion region;
        region.id = rid;
        region.lo = region.hi = {x, y, run.begin};
        h.regions.push_back(std::move(region));
      }
      run.region = rid;
      HoleRegion& region = h.regions[rid];
      region.volume += run.end - run.begin;
      const Voxel lo{x, y, run.begin}, hi{x, y, run.end - 1};
      for (int a = 0; a < 3; ++a) {
        region.lo[a] = std::min(region.lo[a], lo[a]);
        region.hi[a] = std::max(region.hi[a], hi[a]);
      }
    }
  }

  // Region voxel lists in (z, y, x) order, via packed sort keys.
  std::vector<std::vector<std::uint64_t>> keys(h.regions.size());
  for (std::size_t r = 0; r < keys.size(); ++r)
    keys[r].reserve(static_cast<std::size_t>(h.regions[r].volume));
  for (std::size_t c = 0; c < columns; ++c) {
    const std::uint64_t x = c % h.nx, y = c / h.nx;
    for (auto r = h.column_start[c]; r < h.column_start[c + 1]; ++r) {
      const auto& run = h.runs[r];
      for (int z = run.begin; z < run.end; ++z)
        keys[run.region].push_back((std::uint64_t(z) << 42) | (y << 21) | x);
    }
  }
  constexpr std::uint64_t kMask = (std::uint64_t(1) << 21) - 1;
  for (std::size_t r = 0; r < keys.size(); ++r) {
    std::sort(keys[r].begin(), keys[r].end());
    auto& voxels = h.regions[r].voxels;
    voxels.reserve(keys[r].size());
    for (std::uint64_t k : keys[r])
      voxels.push_back({static_cast<int>(k & kMask),
                        static_cast<int>((k >> 21) & kMask),
                        static_cast<int>(k >> 42)});
  }
  return h;
}

bool anchor_fits_hole(const HoleRegion& region, const VoxelTemplate& t,
                      const Voxel& v) {
  for (int a = 0; a < 3; ++a) {
    const int lo = v[a] - t.anchor[a];
    if (lo < region.lo[a] || lo + t.dims[a] - 1 > region.hi[a]) return false;
  }
  return true;
}

bool hole_can_hold(const HoleRegion& region, const VoxelTemplate& t) {
  if (region.volume < t.count) return false;
  for (int a = 0; a < 3; ++a)
    if (region.hi[a] - region.lo[a] + 1 < t.dims[a]) return false;
  return true;
}

std::vector<std::vector<Voxel>> shrink_holes(const HoleLabels& holes,
                                             const VoxelTemplate& t) {
  std::vector<std::vector<Voxel>> out(holes.regions.size());
  for (std::size_t r = 0; r < holes.regions.size(); ++r) {
    const HoleRegion& region = holes.regions[r];
    if (!hole_can_hold(region, t)) continue;
    for (const Voxel& v : region.voxels)
      if (anchor_fits_hole(region, t, v)) out[r].push_back(v);
  }
  return out;
}

std::int64_t underlying_free_volume(const VoxelTemplate& t, const Voxel& o,
                                    const HeightField& hf) {
  std::int64_t u = 0;
  for (int j = 0; j < t.dims[1]; ++j)
    for (int i = 0; i < t.dims[0]; ++i) {
      const int b = t.bottom[t.column(i, j)];
      if (b < 0) continue;
      u += std::max(0, o[2] + b - hf.at(o[0] + i, o[1] + j));
    }
  return u;
}

std::int64_t placement_cost(std::int64_t dh, std::int64_t u,
                            const std::array<int, 3>& dims) {
  if (dh < 0 || u < 0) throw Error("placement cost terms must be >= 0");
  std::int64_t box = 0, scaled = 0, cost = 0;
  if (__builtin_mul_overflow(static_cast<std::int64_t>(dims[0]),
                             static_cast<std::int64_t>(dims[1]), &box) ||
      __builtin_mul_overflow(box, static_cast<std::int64_t>(dims[2]), &box) ||
      __builtin_mul_overflow(dh, box, &scaled) ||
      __builtin_add_overflow(scaled, u, &cost))
    throw Overflow("placement cost exceeds 64-bit range");
  return cost;
}

RasterResult rasterize(std::span<const TetPoints> tets,
                       const RigidTransform& transform, const VoxelGrid& grid) {
  const double s = grid.voxel_size();
  const double tol = 1e-9 * s;
  RasterResult result;
  std::vector<TetPlanes> planes;
  planes.reserve(tets.size());
  for (const TetPoints& t : tets) {
    TetPoints moved;
    for (int k = 0; k < 4; ++k) moved[k] = transform.apply(t[k]);
    TetPlanes tp = make_planes(moved);
    for (int a = 0; a < 3; ++a)
      if (tp.lo[a] < -tol || tp.hi[a] > grid.dims()[a] * s + tol) {
        result.status = RasterResult::Status::kOutOfBounds;
        return result;
      }
    planes.push_back(tp);
  }
  bool collided = false;
  for (const TetPlanes& tp : planes) {
    scan_tet(tp, Point3::Zero(), s, grid.dims(),
             [&](int i, int j, int k0, int k1) {
               for (int k = k0; k < k1 && !collided; ++k) {
                 if (!grid.is_free(i, j, k)) collided = true;
                 result.voxels.push_back({i, j, k});
               }
             });
    if (collided) {
      result.status = RasterResult::Status::kCollision;
      result.voxels.clear();
      return result;
    }
  }
  std::sort(result.voxels.begin(), result.voxels.end());
  result.voxels.erase(std::unique(result.voxels.begin(), result.voxels.end()),
                      result.voxels.end());
  return result;
}

}  // namespace splitpack
