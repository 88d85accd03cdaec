#include "splitpack/packer.hpp"

#include "splitpack/errors.hpp"
#include "splitpack/rotations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <thread>
#include <tuple>

namespace splitpack {
namespace {

constexpr double kRoundingSlack = 1e-9;

int ceil_voxels(double length, double s) {
  return std::max(1, static_cast<int>(std::ceil(length / s - kRoundingSlack)));
}

// Row prefix sums and row sliding-window maxima of a height field, the
// latter built lazily per window length.
class SurfaceCache {
 public:
  explicit SurfaceCache(const HeightField& hf)
      : hf_(hf), prefix_(static_cast<std::size_t>(hf.ny) * (hf.nx + 1), 0),
        window_max_(hf.nx + 1) {
    for (int y = 0; y < hf.ny; ++y)
      for (int x = 0; x < hf.nx; ++x)
        prefix_[row(y) + x + 1] = prefix_[row(y) + x] + hf.at(x, y);
  }

  std::int64_t sum(int y, int x, int len) const {
    return prefix_[row(y) + x + len] - prefix_[row(y) + x];
  }

  // Returns a table t with t[y * stride + x] = max H[x .. x + len) on row y.
  const std::vector<int>& max_of(int len) {
    std::vector<int>& t = window_max_[len];
    if (!t.empty()) return t;
    const int stride = hf_.nx - len + 1;
    t.resize(static_cast<std::size_t>(hf_.ny) * stride);
    // Block prefix and suffix maxima (van Herk / Gil-Werman).
    std::vector<int> pre(hf_.nx), suf(hf_.nx);
    for (int y = 0; y < hf_.ny; ++y) {
      const int* h = hf_.height.data() + static_cast<std::size_t>(y) * hf_.nx;
      for (int x = 0; x < hf_.nx; ++x)
        pre[x] = x % len == 0 ? h[x] : std::max(pre[x - 1], h[x]);
      for (int x = hf_.nx - 1; x >= 0; --x)
        suf[x] = (x + 1) % len == 0 || x + 1 == hf_.nx ? h[x]
                                                        : std::max(suf[x + 1], h[x]);
      int* out = t.data() + static_cast<std::size_t>(y) * stride;
      for (int x = 0; x < stride; ++x) out[x] = std::max(suf[x], pre[x + len - 1]);
    }
    return t;
  }

 private:
  std::size_t row(int y) const { return static_cast<std::size_t>(y) * (hf_.nx + 1); }

  const HeightField& hf_;
  std::vector<std::int64_t> prefix_;
  std::vector<std::vector<int>> window_max_;
};

Placement make_placement(const PreparedPart& part,
                         std::span<const UnitQuaternion> rotations,
                         std::size_t r, const Voxel& o, PlacementBranch branch,
                         const VoxelGrid& grid) {
  const VoxelTemplate& t = part.templates[r];
  const double s = grid.voxel_size();
  Placement p;
  p.rotation_index = r;
  p.rotation = rotations[r];
  p.offset = o;
  p.branch = branch;
  p.translation = Vec3(o[0] * s, o[1] * s, o[2] * s) - t.min_corner;
  p.height_increase =
      std::max<std::int64_t>(0, o[2] + t.occupied_top - grid.height());
  p.underlying_free_volume = underlying_free_volume(t, o, grid.heightfield());
  p.cost = placement_cost(p.height_increase, p.underlying_free_volume,
                          grid.dims());
  return p;
}

std::optional<Placement> place_first(const PreparedPart& part,
                                     std::span<const UnitQuaternion> rotations,
                                     const VoxelGrid& grid) {
  std::optional<std::size_t> best;
  std::tuple<int, std::int64_t, std::int64_t> best_key;
  for (std::size_t r = 0; r < rotations.size(); ++r) {
    const VoxelTemplate& t = part.templates[r];
    if (!grid.fits(t, {0, 0, 0})) continue;
    const auto key = std::tuple{t.occupied_top, t.bottom_sum,
                                std::int64_t{t.dims[0]} * t.dims[1]};
    if (!best || key < best_key) {
      best = r;
      best_key = key;
    }
  }
  if (!best) return std::nullopt;
  return make_placement(part, rotations, *best, {0, 0, 0},
                        PlacementBranch::kFirst, grid);
}

bool inside_region(const VoxelTemplate& t, const Voxel& o,
                   const HoleLabels& holes, int region) {
  for (int j = 0; j < t.dims[1]; ++j)
    for (int i = 0; i < t.dims[0]; ++i) {
      const std::size_t c = t.column(i, j);
      for (auto s = t.interval_start[c]; s < t.interval_start[c + 1]; ++s)
        if (!holes.span_in_region(o[0] + i, o[1] + j, o[2] + t.intervals[s].begin,
                                  o[2] + t.intervals[s].end, region))
          return false;
    }
  return true;
}

std::optional<Placement> place_in_hole(const PreparedPart& part,
                                       std::span<const UnitQuaternion> rotations,
                                       const VoxelGrid& grid,
                                       const HoleLabels& holes) {
  using Key = std::tuple<std::int64_t, int, int, int, int, std::size_t>;
  std::optional<Key> best;
  for (std::size_t r = 0; r < rotations.size(); ++r) {
    const VoxelTemplate& t = part.templates[r];
    for (std::size_t h = 0; h < holes.regions.size(); ++h) {
      const HoleRegion& region = holes.regions[h];
      if (!hole_can_hold(region, t)) continue;
      const std::int64_t waste = region.volume - t.count;
      if (best && std::get<0>(*best) < waste) continue;
      // Voxels are in (z, y, x) order, so the first fit is the best one for
      // this hole and rotation.
      // Only anchors whose z keeps the template in the region's z range.
      const int z_lo = region.lo[2] + t.anchor[2];
      const int z_hi = region.hi[2] - t.dims[2] + 1 + t.anchor[2];
      auto it = std::lower_bound(
          region.voxels.begin(), region.voxels.end(), z_lo,
          [](const Voxel& v, int z) { return v[2] < z; });
      for (; it != region.voxels.end() && (*it)[2] <= z_hi; ++it) {
        const Voxel& v = *it;
        if (!anchor_fits_hole(region, t, v)) continue;
        const Voxel o{v[0] - t.anchor[0], v[1] - t.anchor[1],
                      v[2] - t.anchor[2]};
        bool in_grid = true;
        for (int a = 0; a < 3; ++a)
          in_grid = in_grid && o[a] >= 0 && o[a] + t.dims[a] <= grid.dims()[a];
        if (!in_grid || !inside_region(t, o, holes, static_cast<int>(h)))
          continue;
        const Key key{waste, static_cast<int>(h), o[2], o[1], o[0], r};
        if (!best || key < *best) best = key;
        break;
      }
    }
  }
  if (!best) return std::nullopt;
  const auto [waste, h, z, y, x, r] = *best;
  Placement p = make_placement(part, rotations, r, {x, y, z},
                               PlacementBranch::kHole, grid);
  p.hole_region = h;
  return p;
}

std::optional<Placement> place_on_top(const PreparedPart& part,
                                      std::span<const UnitQuaternion> rotations,
                                      const VoxelGrid& grid) {
  const HeightField& hf = grid.heightfield();
  SurfaceCache cache(hf);
  const int h = grid.height();
  const auto& dims = grid.dims();

  struct Best {
    std::int64_t dh, cost;
    int z, y, x;
    std::size_t r;
  };
  std::optional<Best> best;
  std::vector<const std::vector<int>*> run_max;

  for (std::size_t r = 0; r < rotations.size(); ++r) {
    const VoxelTemplate& t = part.templates[r];
    if (t.dims[0] > dims[0] || t.dims[1] > dims[1] || t.dims[2] > dims[2])
      continue;
    if (best && t.occupied_top - h > best->dh) continue;
    run_max.clear();
    for (const auto& run : t.level_runs) run_max.push_back(&cache.max_of(run.len));

    for (int y = 0; y + t.dims[1] <= dims[1]; ++y)
      for (int x = 0; x + t.dims[0] <= dims[0]; ++x) {
        // Resting height z0 = max over footprint columns of H - bottom.
        int limit = dims[2] - t.dims[2];
        if (best)
          limit = static_cast<int>(std::min<std::int64_t>(
              limit, h + best->dh - t.occupied_top));
        int z0 = 0;
        bool pruned = limit < 0;
        for (std::size_t k = 0; k < t.level_runs.size() && !pruned; ++k) {
          const auto& run = t.level_runs[k];
          const int stride = dims[0] - run.len + 1;
          const int m = (*run_max[k])[static_cast<std::size_t>(y + run.j) *
                                          stride +
                                      x + run.i0] -
                        run.bottom;
          z0 = std::max(z0, m);
          pruned = z0 > limit;
        }
        if (pruned) continue;
        const std::int64_t dh =
            std::max<std::int64_t>(0, z0 + t.occupied_top - h);
        std::int64_t under = t.footprint * z0 + t.bottom_sum;
        for (const auto& run : t.row_runs)
          under -= cache.sum(y + run.j, x + run.i0, run.len);
        const std::int64_t cost = placement_cost(dh, under, dims);
        if (!best || std::tie(cost, z0, y, x, r) <
                         std::tie(best->cost, best->z, best->y, best->x,
                                  best->r))
          best = Best{dh, cost, z0, y, x, r};
      }
  }
  if (!best) return std::nullopt;
  return make_placement(part, rotations, best->r, {best->x, best->y, best->z},
                        PlacementBranch::kTop, grid);
}

std::vector<TetPoints> moved_tets(const PackPart& part,
                                  const RigidTransform& transform) {
  std::vector<TetPoints> out(part.tets.size());
  for (std::size_t i = 0; i < part.tets.size(); ++i)
    for (int k = 0; k < 4; ++k) out[i][k] = transform.apply(part.tets[i][k]);
  return out;
}

struct VariationRun {
  VariationOutcome outcome;
  std::vector<Placement> placements;  // by part id
  Voxel lo{0, 0, 0};                  // lowest occupied template cell
  Aabb bounds;                        // placed geometry, grid coordinates
};

VariationRun run_variation(std::span<const PreparedPart> parts,
                           std::span<const std::size_t> order,
                           std::span<const UnitQuaternion> rotations,
                           const PackerConfig& config,
                           const std::array<int, 3>& dims, double s) {
  VariationRun run;
  run.outcome.dims = dims;
  VoxelGrid grid(dims[0], dims[1], dims[2], s);
  run.placements.resize(parts.size());
  run.lo = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
            std::numeric_limits<int>::max()};
  double volume = 0;
  for (std::size_t id : order) {
    const PreparedPart& part = parts[id];
    Placement p;
    try {
      std::optional<HoleLabels> holes;
      if (config.holes_enabled && grid.height() > 0)
        holes = classify_free_voxels(grid);
      p = place_part(part, rotations, grid, holes ? &*holes : nullptr);
    } catch (const NoPlacement&) {
      return run;
    }
    const VoxelTemplate& t = part.templates[p.rotation_index];
    grid.commit(t, p.offset, static_cast<std::uint16_t>(id + 1));
    for (int a = 0; a < 3; ++a) run.lo[a] = std::min(run.lo[a], p.offset[a]);
    run.bounds.extend(p.translation + t.min_corner);
    run.bounds.extend(p.translation + t.max_corner);
    run.placements[id] = p;
    volume += part.volume;
  }
  run.outcome.placed = true;
  run.outcome.efficiency = volume / run.bounds.volume();
  return run;
}

}  // namespace

PackPart PackPart::from_mesh(const TetMesh& mesh,
                             std::span<const TetIndex> tets) {
  PackPart part;
  part.tets.reserve(tets.size());
  for (TetIndex t : tets) part.tets.push_back(mesh.tet_points(t));
  part.volume = mesh.volume(tets);
  return part;
}

PackPart PackPart::from_mesh(const TetMesh& mesh) {
  std::vector<TetIndex> all(mesh.num_tets());
  for (TetIndex t = 0; t < all.size(); ++t) all[t] = t;
  return from_mesh(mesh, all);
}

std::vector<Point3> PackPart::points() const {
  std::vector<Point3> out;
  out.reserve(4 * tets.size());
  for (const TetPoints& t : tets) out.insert(out.end(), t.begin(), t.end());
  std::sort(out.begin(), out.end(), [](const Point3& a, const Point3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(),
                                        b.data() + 3);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PreparedPart prepare_part(const PackPart& part,
                          std::span<const UnitQuaternion> rotations,
                          double voxel_size) {
  if (part.tets.empty()) throw Error("cannot pack an empty part");
  PreparedPart out;
  const std::vector<Point3> points = part.points();
  out.align = axis_align(points, kContainerEpsilon);
  out.volume = part.volume;
  Aabb aligned;
  for (const Point3& p : points) aligned.extend(out.align.apply(p));
  out.box.center = (aligned.min + aligned.max) / 2;
  out.box.half_extents = aligned.extents() / 2;
  out.templates.reserve(rotations.size());
  for (const UnitQuaternion& q : rotations)
    out.templates.push_back(rasterize_template(
        moved_tets(part, RigidTransform{q, Vec3::Zero()}.after(out.align)),
        voxel_size));
  return out;
}

Placement place_part(const PreparedPart& part,
                     std::span<const UnitQuaternion> rotations,
                     const VoxelGrid& grid, const HoleLabels* holes) {
  if (rotations.empty()) throw Error("no rotations to try");
  if (part.templates.size() < rotations.size())
    throw Error("part was prepared for fewer rotations");
  std::optional<Placement> p;
  if (grid.height() == 0) {
    p = place_first(part, rotations, grid);
  } else {
    if (holes && !holes->regions.empty())
      p = place_in_hole(part, rotations, grid, *holes);
    if (!p) p = place_on_top(part, rotations, grid);
  }
  if (!p) throw NoPlacement("no rasterizeable position for the part");
  return *p;
}

ContainerSpec container_spec(std::span<const PackPart> parts,
                             const PackerConfig& config) {
  if (parts.empty()) throw Error("nothing to pack");
  if (config.grid_budget < 1) throw ConfigError("grid budget must be >= 1");
  ContainerSpec spec;
  const int n = config.grid_budget;
  if (config.container == ContainerMode::kAssembled) {
    std::vector<Point3> points;
    for (const PackPart& p : parts) {
      const auto pts = p.points();
      points.insert(points.end(), pts.begin(), pts.end());
    }
    const OrientedBox box = approximate_mbb(points, kContainerEpsilon);
    std::array<double, 3> e{box.extents().x(), box.extents().y(),
                            box.extents().z()};
    std::sort(e.begin(), e.end(), std::greater<>());
    if (!(e[0] > 0)) throw DegenerateBox("object has no extent");
    spec.voxel_size = e[0] / n;
    spec.dims = {ceil_voxels(e[1], spec.voxel_size),
                 ceil_voxels(e[2], spec.voxel_size), n};
  } else {
    double boxes = 0, largest = 0;
    for (const PackPart& p : parts) {
      const OrientedBox box = approximate_mbb(p.points(), kContainerEpsilon);
      boxes += box.volume();
      largest = std::max(largest, box.max_extent());
    }
    const double side = 2.0 * largest;
    if (!(side > 0)) throw DegenerateBox("parts have no extent");
    spec.voxel_size = side / n;
    spec.dims = {n, n, std::max(n, ceil_voxels(2.0 * boxes / (side * side), spec.voxel_size))};
  }
  return spec;
}

VoxelGrid init_container(std::span<const PackPart> parts,
                         const PackerConfig& config) {
  const ContainerSpec spec = container_spec(parts, config);
  return VoxelGrid(spec.dims[0], spec.dims[1], spec.dims[2], spec.voxel_size);
}

std::vector<std::size_t> insertion_order(std::span<const PreparedPart> parts,
                                         InsertionOrder order,
                                         std::uint64_t seed) {
  std::vector<std::size_t> ids(parts.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  if (order == InsertionOrder::kSorted) {
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      return parts[a].box.max_extent() > parts[b].box.max_extent();
    });
  } else {
    // Fisher-Yates on the raw engine: identical across standard libraries.
    std::mt19937_64 rng(derive_seed(seed, "insertion-order"));
    for (std::size_t i = ids.size(); i > 1; --i)
      std::swap(ids[i - 1], ids[rng() % i]);
  }
  return ids;
}

PackingResult pack(std::span<const PackPart> parts, const PackerConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.rotations < 1) throw ConfigError("rotations must be >= 1");
  if (config.base_factors.empty()) throw ConfigError("no base factors");
  for (double f : config.base_factors)
    if (!(f > -1.0)) throw ConfigError("base factors must be > -1");
  if (parts.size() >= std::numeric_limits<std::uint16_t>::max())
    throw ConfigError("too many parts");

  const ContainerSpec spec = container_spec(parts, config);
  const double s = spec.voxel_size;
  const auto rotations = packing_rotations(
      static_cast<std::size_t>(config.rotations),
      derive_seed(config.seed, "rotations"));
  std::vector<PreparedPart> prepared;
  prepared.reserve(parts.size());
  for (const PackPart& p : parts) prepared.push_back(prepare_part(p, rotations, s));
  const auto order = insertion_order(prepared, config.order, config.seed);

  unsigned threads = config.threads ? config.threads
                                    : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);

  PackingResult result;
  result.insertion_order = order;
  result.voxel_size = s;
  std::optional<VariationRun> best;
  for (int attempt = 0; attempt <= config.height_retries && !best; ++attempt) {
    const double height_scale = std::ldexp(1.0, attempt);
    std::vector<std::array<int, 3>> dims;
    result.variations.clear();
    for (double fx : config.base_factors)
      for (double fy : config.base_factors) {
        VariationOutcome v;
        v.factor_x = fx;
        v.factor_y = fy;
        v.dims = {
            std::max(1, static_cast<int>(std::lround(spec.dims[0] * (1 + fx)))),
            std::max(1, static_cast<int>(std::lround(spec.dims[1] * (1 + fy)))),
            ceil_voxels(spec.dims[2] * height_scale / ((1 + fx) * (1 + fy)),
                        1.0)};
        v.skipped = (config.base_max_x && v.dims[0] * s > *config.base_max_x) ||
                    (config.base_max_y && v.dims[1] * s > *config.base_max_y);
        result.variations.push_back(v);
      }

    std::vector<std::optional<VariationRun>> runs(result.variations.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (!result.variations[i].skipped) todo.push_back(i);
    for (std::size_t b = 0; b < todo.size(); b += threads) {
      std::vector<std::future<VariationRun>> batch;
      const std::size_t end = std::min(todo.size(), b + threads);
      for (std::size_t k = b; k < end; ++k) {
        const auto d = result.variations[todo[k]].dims;
        auto task = [&, d] {
          return run_variation(prepared, order, rotations, config, d, s);
        };
        batch.push_back(end - b == 1 ? std::async(std::launch::deferred, task)
                                     : std::async(std::launch::async, task));
      }
      for (std::size_t k = b; k < end; ++k) runs[todo[k]] = batch[k - b].get();
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i]) continue;
      const VariationOutcome& o = runs[i]->outcome;
      result.variations[i].placed = o.placed;
      result.variations[i].efficiency = o.efficiency;
      if (o.placed && (!best || o.efficiency > best->outcome.efficiency)) {
        best = std::move(runs[i]);
        result.variation = static_cast<int>(i);
      }
    }
    if (!best) ++result.height_doublings;
  }
  if (!best) throw NoPlacement("no base variation could place every part");

  result.grid_dims = best->outcome.dims;
  result.box_extents = best->bounds.extents();
  const Vec3 shift = best->bounds.min;
  result.placements.resize(parts.size());
  for (std::size_t id = 0; id < parts.size(); ++id) {
    const Placement& p = best->placements[id];
    PackedPart& out = result.placements[id];
    out.part_id = id;
    out.transform = RigidTransform{p.rotation, p.translation - shift}.after(
        prepared[id].align);
    out.rotation_index = p.rotation_index;
    out.offset = {p.offset[0] - best->lo[0], p.offset[1] - best->lo[1],
                  p.offset[2] - best->lo[2]};
    out.branch = p.branch;
    out.height_increase = p.height_increase;
    out.underlying_free_volume = p.underlying_free_volume;
    result.parts_volume += parts[id].volume;
  }
  result.efficiency = result.parts_volume / result.box_volume();
  result.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

PackingResult bounding_box_packing(const PackPart& part, double epsilon) {
  PackingResult result;
  const std::vector<Point3> points = part.points();
  const RigidTransform align = axis_align(points, epsilon);
  Aabb box;
  for (const Point3& p : points) box.extend(align.apply(p));
  PackedPart placed;
  placed.transform = RigidTransform{UnitQuaternion::identity(), -box.min}.after(align);
  placed.branch = PlacementBranch::kFirst;
  result.placements.push_back(placed);
  result.insertion_order = {0};
  result.box_extents = box.extents();
  result.parts_volume = part.volume;
  result.efficiency =
      result.box_volume() > 0 ? part.volume / result.box_volume() : 0.0;
  return result;
}

}  // namespace splitpack
