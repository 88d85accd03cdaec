#include "fixtures.hpp"
#include "oracles.hpp"

#include "splitpack/errors.hpp"
#include "splitpack/packer.hpp"
#include "splitpack/rotations.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace splitpack;

namespace {

std::vector<TetPoints> transformed(const PackPart& part, const RigidTransform& t) {
  std::vector<TetPoints> out;
  for (const TetPoints& tet : part.tets) {
    TetPoints q;
    for (int v = 0; v < 4; ++v) q[v] = t.apply(tet[v]);
    out.push_back(q);
  }
  return out;
}

VoxelGrid random_grid(std::mt19937_64& rng, int nx, int ny, int nz, double density) {
  VoxelGrid grid(nx, ny, nz, 1.0);
  std::bernoulli_distribution occupied(density);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        if (occupied(rng)) grid.set_owner(x, y, z, 1);
  return grid;
}

std::set<Voxel> template_cells(const VoxelTemplate& t, const Voxel& o) {
  std::set<Voxel> out;
  for (const Voxel& v : t.voxels()) out.insert({v[0] + o[0], v[1] + o[1], v[2] + o[2]});
  return out;
}

}  // namespace

TEST(RasterizeTemplate, UnitBox) {
  const PackPart p = fixtures::box_part(Vec3(1, 1, 1));
  const VoxelTemplate t = rasterize_template(p.tets, 0.25);
  EXPECT_EQ(t.dims, (std::array<int, 3>{4, 4, 4}));
  EXPECT_EQ(t.count, 64);
  EXPECT_EQ(t.footprint, 16);
  EXPECT_EQ(t.occupied_top, 4);
  EXPECT_EQ(t.bottom_sum, 0);
}

TEST(RasterizeTemplate, MatchesBarycentricOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    TetPoints tet;
    for (auto& p : tet) p = Point3(u(rng), u(rng), u(rng));
    if (tet_volume(tet[0], tet[1], tet[2], tet[3]) < 0.02) continue;
    const double s = 0.1;
    const VoxelTemplate t = rasterize_template(std::span(&tet, 1), s);
    Aabb box;
    for (const Point3& p : tet) box.extend(p);
    const auto expected = oracles::rasterize(std::span(&tet, 1), box.min, s, t.dims);
    auto got = t.voxels();
    std::sort(got.begin(), got.end());
    auto want = expected;
    std::sort(want.begin(), want.end());
    // Boundary-grazing centres may go either way; allow a handful.
    std::vector<Voxel> diff;
    std::set_symmetric_difference(got.begin(), got.end(), want.begin(), want.end(),
                                  std::back_inserter(diff));
    EXPECT_LE(diff.size(), 2u);
    EXPECT_EQ(static_cast<std::int64_t>(got.size()), t.count);
  }
}

TEST(RasterizeTemplate, ThinPartKeepsOneVoxel) {
  const PackPart p = fixtures::box_part(Vec3(1, 1, 0.01));
  const VoxelTemplate t = rasterize_template(p.tets, 0.25);
  EXPECT_GE(t.count, 1);
  EXPECT_EQ(t.dims[2], 1);
}

TEST(RasterizeTemplate, VoxelVolumeCloseToExactAtFineResolution) {
  const auto q = sample_rotations(1, 8).front();
  const PackPart p = PackPart::from_mesh(fixtures::five_tet_cube());
  std::vector<TetPoints> tets;
  for (const auto& tet : p.tets) {
    TetPoints r;
    for (int v = 0; v < 4; ++v) r[v] = q.rotate(tet[v]);
    tets.push_back(r);
  }
  const double s = 1.0 / 256;
  const VoxelTemplate t = rasterize_template(tets, s);
  EXPECT_NEAR(t.count * s * s * s, 1.0, 0.05);
}

TEST(VoxelGrid, CommitMaintainsHeightField) {
  std::mt19937_64 rng(3);
  VoxelGrid grid(12, 10, 14, 1.0);
  for (int k = 0; k < 20; ++k) {
    const PackPart part = fixtures::random_part(rng);
    const VoxelTemplate t = rasterize_template(part.tets, 1.0);
    std::uniform_int_distribution<int> ox(0, 11), oy(0, 9), oz(0, 13);
    const Voxel o{ox(rng), oy(rng), oz(rng)};
    if (!grid.fits(t, o)) continue;
    grid.commit(t, o, static_cast<std::uint16_t>(k + 1));
    EXPECT_EQ(grid.heightfield(), compute_heightfield(grid));
    EXPECT_EQ(grid.height(), compute_heightfield(grid).max());
  }
  EXPECT_GT(grid.occupied_count(), 0);
}

TEST(VoxelGrid, CommitRejectsOverlap) {
  VoxelGrid grid(4, 4, 4, 1.0);
  const VoxelTemplate t = rasterize_template(fixtures::box_part(Vec3(2, 2, 2)).tets, 1.0);
  grid.commit(t, {0, 0, 0}, 1);
  EXPECT_FALSE(grid.fits(t, {1, 1, 1}));
  EXPECT_TRUE(grid.fits(t, {2, 2, 2}));
  EXPECT_FALSE(grid.fits(t, {3, 0, 0}));
  EXPECT_THROW(grid.commit(t, {1, 1, 1}, 2), Error);
}

TEST(HoleLabels, MatchBruteForceOnRandomGrids) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const VoxelGrid grid = random_grid(rng, 9, 7, 8, trial % 2 ? 0.3 : 0.6);
    const HoleLabels labels = classify_free_voxels(grid);
    const std::vector<int> cls = oracles::classify(grid);
    std::map<int, std::int64_t> sizes;
    for (int z = 0; z < grid.nz(); ++z)
      for (int y = 0; y < grid.ny(); ++y)
        for (int x = 0; x < grid.nx(); ++x) {
          const int want = cls[x + 9 * (y + 7 * z)];
          const VoxelClass got = labels.classify(x, y, z);
          EXPECT_EQ(static_cast<int>(got), want == 0 ? 0 : (want == 1 ? 1 : 2));
          const int r = labels.region_at(x, y, z);
          if (r >= 0) {
            ++sizes[r];
            // 6-neighbours in holes share the region.
            if (x + 1 < grid.nx() && labels.region_at(x + 1, y, z) >= 0)
              EXPECT_EQ(labels.region_at(x + 1, y, z), r);
            if (y + 1 < grid.ny() && labels.region_at(x, y + 1, z) >= 0)
              EXPECT_EQ(labels.region_at(x, y + 1, z), r);
            if (z + 1 < grid.nz() && labels.region_at(x, y, z + 1) >= 0)
              EXPECT_EQ(labels.region_at(x, y, z + 1), r);
          }
        }
    std::vector<std::int64_t> got_sizes;
    for (const auto& [r, n] : sizes) {
      got_sizes.push_back(n);
      EXPECT_EQ(labels.regions[r].volume, n);
      EXPECT_EQ(static_cast<std::int64_t>(labels.regions[r].voxels.size()), n);
      EXPECT_TRUE(std::is_sorted(labels.regions[r].voxels.begin(),
                                 labels.regions[r].voxels.end(),
                                 [](const Voxel& a, const Voxel& b) {
                                   return std::tie(a[2], a[1], a[0]) <
                                          std::tie(b[2], b[1], b[0]);
                                 }));
    }
    std::sort(got_sizes.begin(), got_sizes.end());
    EXPECT_EQ(got_sizes, oracles::hole_region_sizes(grid));
    EXPECT_EQ(labels.regions.size(), got_sizes.size());
    EXPECT_EQ(labels, classify_free_voxels(grid));
  }
}

TEST(HoleLabels, CupHasOneEnclosedHole) {
  VoxelGrid grid(3, 3, 3, 1.0);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) grid.set_owner(x, y, 2, 1);
  const HoleLabels labels = classify_free_voxels(grid);
  ASSERT_EQ(labels.regions.size(), 1u);
  EXPECT_EQ(labels.regions[0].volume, 18);
  EXPECT_EQ(labels.classify(1, 1, 2), VoxelClass::kOccupied);
}

TEST(ShrinkHoles, AnchorsKeepTemplateInsideBoundingBox) {
  VoxelGrid grid(4, 4, 3, 1.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) grid.set_owner(x, y, 2, 1);
  const HoleLabels labels = classify_free_voxels(grid);
  const VoxelTemplate t = rasterize_template(fixtures::box_part(Vec3(2, 2, 2)).tets, 1.0);
  const auto shrunk = shrink_holes(labels, t);
  ASSERT_EQ(shrunk.size(), 1u);
  // Anchor positions where the 2x2x2 block stays in the 4x4x2 hole.
  EXPECT_EQ(shrunk[0].size(), 9u);
  for (const Voxel& v : shrunk[0])
    EXPECT_TRUE(anchor_fits_hole(labels.regions[0], t, v));
  const VoxelTemplate big = rasterize_template(fixtures::box_part(Vec3(2, 2, 3)).tets, 1.0);
  EXPECT_FALSE(hole_can_hold(labels.regions[0], big));
}

TEST(PlacementCost, UnderlyingFreeVolumeAndOverflow) {
  // An L-shaped step: the part's flat bottom over a surface of heights 0 and 2.
  HeightField hf{2, 1, {0, 2}};
  const VoxelTemplate t = rasterize_template(fixtures::box_part(Vec3(2, 1, 1)).tets, 1.0);
  EXPECT_EQ(underlying_free_volume(t, {0, 0, 2}, hf), 2);
  EXPECT_EQ(underlying_free_volume(t, {0, 0, 3}, hf), 4);
  // Columns below the surface are floored at 0.
  EXPECT_EQ(underlying_free_volume(t, {0, 0, 1}, hf), 1);
  EXPECT_EQ(placement_cost(2, 5, {4, 4, 4}), 2 * 64 + 5);
  EXPECT_THROW(placement_cost(std::int64_t{1} << 40, 0, {1 << 20, 1 << 20, 1 << 20}),
               Overflow);
}

TEST(PlacePart, FirstPartGoesToCornerFlat) {
  const auto rotations = packing_rotations(6, 1);
  const PreparedPart part = prepare_part(fixtures::box_part(Vec3(4, 2, 1)), rotations, 1.0);
  VoxelGrid grid(8, 8, 8, 1.0);
  const Placement p = place_part(part, rotations, grid, nullptr);
  EXPECT_EQ(p.branch, PlacementBranch::kFirst);
  EXPECT_EQ(p.offset, (Voxel{0, 0, 0}));
  EXPECT_EQ(part.templates[p.rotation_index].dims[2], 1);
}

TEST(PlacePart, PrefersHoleOverTop) {
  const auto rotations = packing_rotations(6, 1);
  VoxelGrid grid(4, 4, 4, 1.0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) grid.set_owner(x, y, 2, 1);
  const PreparedPart part = prepare_part(fixtures::box_part(Vec3(1, 1, 1)), rotations, 1.0);
  const HoleLabels labels = classify_free_voxels(grid);
  const Placement in_hole = place_part(part, rotations, grid, &labels);
  EXPECT_EQ(in_hole.branch, PlacementBranch::kHole);
  EXPECT_EQ(in_hole.offset, (Voxel{0, 0, 0}));
  const Placement on_top = place_part(part, rotations, grid, nullptr);
  EXPECT_EQ(on_top.branch, PlacementBranch::kTop);
  EXPECT_EQ(on_top.offset[2], 3);
  EXPECT_EQ(on_top.height_increase, 1);
}

TEST(PlacePart, NoPlacementWhenTooLarge) {
  const auto rotations = packing_rotations(2, 1);
  const PreparedPart part = prepare_part(fixtures::box_part(Vec3(5, 5, 5)), rotations, 1.0);
  VoxelGrid grid(4, 4, 4, 1.0);
  EXPECT_THROW(place_part(part, rotations, grid, nullptr), NoPlacement);
}

TEST(PlacePart, TopBranchMatchesBruteForceOracle) {
  std::mt19937_64 rng(99);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> side(8, 16);
    VoxelGrid grid(side(rng), side(rng), side(rng), 1.0);
    const auto rotations =
        packing_rotations(1 + rng() % 4, derive_seed(static_cast<std::uint64_t>(trial), "t"));
    const int parts = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < parts; ++k) {
      const PreparedPart part = prepare_part(fixtures::random_part(rng), rotations, 1.0);
      Placement p;
      try {
        p = place_part(part, rotations, grid, nullptr);
      } catch (const NoPlacement&) {
        EXPECT_FALSE(oracles::min_surface_cost(part.templates, grid).found &&
                     grid.height() > 0);
        break;
      }
      if (grid.height() > 0) {
        const auto oracle = oracles::min_surface_cost(part.templates, grid);
        ASSERT_TRUE(oracle.found);
        EXPECT_EQ(p.cost, oracle.cost);
        EXPECT_EQ(p.cost, placement_cost(p.height_increase, p.underlying_free_volume,
                                         grid.dims()));
        ++compared;
      }
      const int before = grid.height();
      grid.commit(part.templates[p.rotation_index], p.offset,
                  static_cast<std::uint16_t>(k + 1));
      EXPECT_EQ(p.height_increase, grid.height() - before);
    }
  }
  EXPECT_GT(compared, 20);
}

TEST(ContainerSpec, AssembledUsesLongestAxisVertical) {
  const PackPart part = fixtures::box_part(Vec3(4, 1, 2));
  PackerConfig c;
  c.grid_budget = 8;
  const ContainerSpec spec = container_spec(std::span(&part, 1), c);
  EXPECT_DOUBLE_EQ(spec.voxel_size, 0.5);
  EXPECT_EQ(spec.dims[2], 8);
  EXPECT_EQ(spec.dims[0], 4);
  EXPECT_EQ(spec.dims[1], 2);
  c.grid_budget = 0;
  EXPECT_THROW(container_spec(std::span(&part, 1), c), ConfigError);
  EXPECT_THROW(container_spec(std::span<const PackPart>(), PackerConfig{}), Error);
}

TEST(InsertionOrder, SortedByLargestExtentRandomIsPermutation) {
  const auto rotations = packing_rotations(1, 0);
  std::vector<PreparedPart> parts;
  for (double e : {1.0, 3.0, 2.0, 0.5})
    parts.push_back(prepare_part(fixtures::box_part(Vec3(e, 0.4, 0.4)), rotations, 0.25));
  EXPECT_EQ(insertion_order(parts, InsertionOrder::kSorted, 0),
            (std::vector<std::size_t>{1, 2, 0, 3}));
  auto r = insertion_order(parts, InsertionOrder::kRandom, 4);
  EXPECT_EQ(r, insertion_order(parts, InsertionOrder::kRandom, 4));
  std::sort(r.begin(), r.end());
  EXPECT_EQ(r, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Pack, SingleBoxIsNearlyExact) {
  const PackPart part = fixtures::box_part(Vec3(1, 2, 3));
  PackerConfig c;
  c.grid_budget = 128;
  c.container = ContainerMode::kIndependent;
  const PackingResult r = pack(std::span(&part, 1), c);
  EXPECT_GE(r.efficiency, 0.95);
  EXPECT_LE(r.efficiency, 1.0 + 1e-9);
}

TEST(Pack, TwoCubes) {
  const std::vector<PackPart> parts{fixtures::box_part(Vec3::Ones()),
                                    fixtures::box_part(Vec3::Ones())};
  PackerConfig c;
  c.grid_budget = 128;
  c.container = ContainerMode::kIndependent;
  const PackingResult r = pack(parts, c);
  EXPECT_LE(r.box_volume(), 2.2);
  EXPECT_GE(r.box_volume(), 2.0 - 1e-9);
}

TEST(Pack, ValidAndRigid) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<PackPart> parts;
    const int n = 2 + static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) parts.push_back(fixtures::random_part(rng));
    PackerConfig c;
    c.grid_budget = 24;
    c.rotations = 4;
    c.seed = static_cast<std::uint64_t>(trial);
    c.container = trial % 2 ? ContainerMode::kIndependent : ContainerMode::kAssembled;
    c.order = trial % 3 ? InsertionOrder::kSorted : InsertionOrder::kRandom;
    const PackingResult r = pack(parts, c);
    ASSERT_EQ(r.placements.size(), parts.size());

    const auto rotations = packing_rotations(4, derive_seed(c.seed, "rotations"));
    std::set<Voxel> used;
    std::size_t total = 0;
    for (std::size_t id = 0; id < parts.size(); ++id) {
      const PackedPart& pp = r.placements[id];
      const PreparedPart prep = prepare_part(parts[id], rotations, r.voxel_size);
      const auto cells = template_cells(prep.templates[pp.rotation_index], pp.offset);
      for (const Voxel& v : cells)
        for (int a = 0; a < 3; ++a) {
          EXPECT_GE(v[a], 0);
          EXPECT_LT(v[a] * r.voxel_size, r.box_extents[a] + 1e-9);
        }
      used.insert(cells.begin(), cells.end());
      total += cells.size();
      // Rigid: exact volume preserved, geometry inside the box.
      double moved = 0;
      for (const TetPoints& t : transformed(parts[id], pp.transform)) {
        moved += tet_volume(t[0], t[1], t[2], t[3]);
        for (const Point3& p : t)
          for (int a = 0; a < 3; ++a) {
            EXPECT_GE(p[a], -1e-9);
            EXPECT_LE(p[a], r.box_extents[a] + 1e-9);
          }
      }
      EXPECT_NEAR(moved, parts[id].volume, 1e-9 * parts[id].volume);
    }
    EXPECT_EQ(used.size(), total);
    double volume = 0;
    for (const PackPart& p : parts) volume += p.volume;
    EXPECT_NEAR(r.efficiency, volume / r.box_volume(), 1e-12);
    EXPECT_LE(r.efficiency, 1.0 + 1e-9);
  }
}

TEST(Pack, Deterministic) {
  std::mt19937_64 rng(8);
  std::vector<PackPart> parts;
  for (int k = 0; k < 5; ++k) parts.push_back(fixtures::random_part(rng));
  PackerConfig c;
  c.grid_budget = 24;
  c.rotations = 5;
  c.seed = 77;
  c.container = ContainerMode::kIndependent;
  const PackingResult a = pack(parts, c);
  const PackingResult b = pack(parts, c);
  EXPECT_EQ(a.efficiency, b.efficiency);
  EXPECT_EQ(a.box_extents, b.box_extents);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    EXPECT_EQ(a.placements[i].offset, b.placements[i].offset);
    EXPECT_EQ(a.placements[i].rotation_index, b.placements[i].rotation_index);
    EXPECT_EQ(a.placements[i].transform.translation, b.placements[i].transform.translation);
  }
}

TEST(Pack, BaseBoundsSkipVariations) {
  const std::vector<PackPart> parts{fixtures::box_part(Vec3(1, 1, 1)),
                                    fixtures::box_part(Vec3(1, 1, 1))};
  PackerConfig c;
  c.grid_budget = 16;
  c.rotations = 1;
  c.container = ContainerMode::kIndependent;
  const PackingResult free = pack(parts, c);
  const double base = free.variations[0].dims[0] * free.voxel_size;
  c.base_max_x = base * 1.1;
  const PackingResult bounded = pack(parts, c);
  ASSERT_EQ(bounded.variations.size(), 16u);
  for (const auto& v : bounded.variations) {
    EXPECT_EQ(v.skipped, v.dims[0] * bounded.voxel_size > *c.base_max_x);
    if (v.skipped) EXPECT_FALSE(v.placed);
  }
  EXPECT_TRUE(bounded.variations[bounded.variation].factor_x <= 0.0);
}

TEST(Pack, RejectsBadConfig) {
  const PackPart part = fixtures::box_part(Vec3::Ones());
  PackerConfig c;
  c.rotations = 0;
  EXPECT_THROW(pack(std::span(&part, 1), c), ConfigError);
  c = PackerConfig{};
  c.base_factors = {-1.0};
  EXPECT_THROW(pack(std::span(&part, 1), c), ConfigError);
}

TEST(BoundingBoxPacking, BoxIsExact) {
  const PackPart part = fixtures::box_part(Vec3(1, 2, 3));
  const PackingResult r = bounding_box_packing(part);
  EXPECT_NEAR(r.efficiency, 1.0, 1e-6);
  EXPECT_NEAR(r.box_volume(), 6.0, 1e-5);
}
