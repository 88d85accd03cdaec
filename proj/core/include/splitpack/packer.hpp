#pragma once

#include "splitpack/mbb.hpp"
#include "splitpack/tetmesh.hpp"
#include "splitpack/voxel_grid.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace splitpack {

enum class InsertionOrder { kSorted, kRandom };

/// How the initial container is sized.
enum class ContainerMode {
  /// Bounding box of the parts in their input (assembled) pose, longest
  /// axis vertical.
  kAssembled,
  /// Parts given in unrelated poses: a square base twice as wide as the
  /// largest part's bounding box, tall enough for twice the summed bounding
  /// box volumes; the grid budget applies to the base side.
  kIndependent,
};

struct PackerConfig {
  int grid_budget = 256;
  int rotations = 10;
  std::uint64_t seed = 0;
  std::vector<double> base_factors{0.0, 0.25, 0.5, -0.25};
  std::optional<double> base_max_x;
  std::optional<double> base_max_y;
  bool holes_enabled = true;
  InsertionOrder order = InsertionOrder::kSorted;
  ContainerMode container = ContainerMode::kAssembled;
  /// Times the container height is doubled when no variation fits.
  int height_retries = 3;
  /// Worker threads for the base variations; 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Geometry of one part to pack, in the caller's coordinates.
struct PackPart {
  std::vector<TetPoints> tets;
  double volume = 0.0;

  static PackPart from_mesh(const TetMesh& mesh, std::span<const TetIndex> tets);
  static PackPart from_mesh(const TetMesh& mesh);
  std::vector<Point3> points() const;
};

/// A part axis-aligned by its bounding box and rasterized once per rotation.
struct PreparedPart {
  RigidTransform align;
  OrientedBox box;  // axis-aligned, centered at the origin
  double volume = 0.0;
  std::vector<VoxelTemplate> templates;
};

PreparedPart prepare_part(const PackPart& part,
                          std::span<const UnitQuaternion> rotations,
                          double voxel_size);

enum class PlacementBranch { kFirst, kHole, kTop };

struct Placement {
  std::size_t rotation_index = 0;
  UnitQuaternion rotation;
  /// Translation of the rotated, axis-aligned part in grid coordinates
  /// (model units, grid corner at the origin).
  Vec3 translation = Vec3::Zero();
  /// Grid voxel of the template's cell (0, 0, 0).
  Voxel offset{0, 0, 0};
  PlacementBranch branch = PlacementBranch::kTop;
  int hole_region = -1;
  std::int64_t height_increase = 0;
  std::int64_t underlying_free_volume = 0;
  std::int64_t cost = 0;
};

/// Best placement of `part` in the current grid. Into an empty grid the part
/// goes to the lower-left corner in the rotation of least vertical extent.
/// Otherwise a hole placement is preferred when `holes` is given and one
/// exists (smallest hole-minus-part volume); failing that, the part rests on
/// the height field at the position of minimal cost. Throws NoPlacement when
/// nothing fits.
Placement place_part(const PreparedPart& part,
                     std::span<const UnitQuaternion> rotations,
                     const VoxelGrid& grid, const HoleLabels* holes);

struct PackedPart {
  std::size_t part_id = 0;
  /// Maps the part from input coordinates into the final box [0, extents].
  RigidTransform transform;
  std::size_t rotation_index = 0;
  /// Voxel of the template's cell (0, 0, 0); voxel (0, 0, 0) has its corner
  /// at the box origin.
  Voxel offset{0, 0, 0};
  PlacementBranch branch = PlacementBranch::kTop;
  std::int64_t height_increase = 0;
  std::int64_t underlying_free_volume = 0;
};

struct VariationOutcome {
  double factor_x = 0.0, factor_y = 0.0;
  std::array<int, 3> dims{0, 0, 0};
  bool skipped = false;  // violates a base-size bound
  bool placed = false;
  double efficiency = 0.0;
};

struct PackingResult {
  std::vector<PackedPart> placements;  // indexed by part id
  std::vector<std::size_t> insertion_order;
  Vec3 box_extents = Vec3::Zero();
  double parts_volume = 0.0;
  double efficiency = 0.0;
  int variation = -1;  // index into `variations`, -1 if no voxel packing
  std::vector<VariationOutcome> variations;
  std::array<int, 3> grid_dims{0, 0, 0};
  double voxel_size = 0.0;
  int height_doublings = 0;
  double elapsed_ms = 0.0;

  double box_volume() const { return box_extents.prod(); }
};

struct ContainerSpec {
  std::array<int, 3> dims{1, 1, 1};
  double voxel_size = 1.0;
};

ContainerSpec container_spec(std::span<const PackPart> parts,
                             const PackerConfig& config);

/// Empty grid of the initial container.
VoxelGrid init_container(std::span<const PackPart> parts,
                         const PackerConfig& config);

/// Runs the insertion loop for every base variation and keeps the most
/// efficient packing, with the box shrunk to tangency with the placed parts.
PackingResult pack(std::span<const PackPart> parts, const PackerConfig& config);

/// The whole part in its own bounding box: the unsplit starting point.
PackingResult bounding_box_packing(const PackPart& part,
                                   double epsilon = kContainerEpsilon);

/// Order in which the parts are inserted.
std::vector<std::size_t> insertion_order(std::span<const PreparedPart> parts,
                                         InsertionOrder order,
                                         std::uint64_t seed);

}  // namespace splitpack
