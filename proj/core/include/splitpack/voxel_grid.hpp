#pragma once

#include "splitpack/geometry.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace splitpack {

using Voxel = std::array<int, 3>;
using TetPoints = std::array<Point3, 4>;

/// 2D map of the upper surface of the placed parts: for each column the
/// top of the highest occupied voxel, 0 for empty columns.
struct HeightField {
  int nx = 0, ny = 0;
  std::vector<int> height;  // index y * nx + x

  int at(int x, int y) const { return height[static_cast<std::size_t>(y) * nx + x]; }
  int max() const;
  bool operator==(const HeightField&) const = default;
};

/// A part rasterized in one orientation, with its bounding cells starting at
/// voxel (0, 0, 0). Occupancy is stored as vertical intervals per column.
struct VoxelTemplate {
  struct Interval {
    int begin, end;  // [begin, end) in z
  };
  struct Run {
    int j, i0, len, bottom;
  };

  std::array<int, 3> dims{1, 1, 1};
  /// interval_start[c] .. interval_start[c + 1] index `intervals` for the
  /// column c = j * dims[0] + i.
  std::vector<std::uint32_t> interval_start;
  std::vector<Interval> intervals;
  std::vector<int> bottom;  // lowest occupied z per column, -1 if empty
  std::vector<int> top;     // one past the highest occupied z, -1 if empty
  int occupied_top = 0;     // max over columns of top
  std::int64_t count = 0;   // occupied voxels
  std::int64_t footprint = 0;
  std::int64_t bottom_sum = 0;
  /// Maximal row segments of footprint columns sharing the same bottom.
  std::vector<Run> level_runs;
  /// Maximal row segments of footprint columns.
  std::vector<Run> row_runs;
  /// Voxel containing the part's center.
  Voxel anchor{0, 0, 0};
  /// Model-space position of the cell corner (0, 0, 0) relative to the
  /// part's center.
  Point3 min_corner = Point3::Zero();
  /// Same for the far corner of the part's bounding box.
  Point3 max_corner = Point3::Zero();

  std::size_t column(int i, int j) const {
    return static_cast<std::size_t>(j) * dims[0] + i;
  }
  bool occupied(int i, int j, int k) const;
  std::vector<Voxel> voxels() const;
};

/// Rasterizes tetrahedra given in a frame centered on the part: a voxel is
/// occupied when its center lies inside a tetrahedron. The template's cell
/// (0, 0, 0) starts at the minimum corner of the tetrahedra's bounding box.
/// A part too thin to cover any voxel center still occupies the voxel
/// holding its centroid.
VoxelTemplate rasterize_template(std::span<const TetPoints> tets,
                                 double voxel_size);

/// Uniform voxelization of an axis-aligned container. Voxels store 0 when
/// free and the owning part label otherwise.
class VoxelGrid {
 public:
  VoxelGrid(int nx, int ny, int nz, double voxel_size);

  int nx() const { return dims_[0]; }
  int ny() const { return dims_[1]; }
  int nz() const { return dims_[2]; }
  const std::array<int, 3>& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  std::int64_t volume() const {
    return static_cast<std::int64_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  bool inside(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] &&
           z < dims_[2];
  }
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(y) * dims_[0] + x) * dims_[2] + z;
  }
  std::uint16_t owner(int x, int y, int z) const { return cells_[index(x, y, z)]; }
  bool is_free(int x, int y, int z) const { return owner(x, y, z) == 0; }
  void set_owner(int x, int y, int z, std::uint16_t label);
  /// Owners of the column (x, y), bottom to top.
  const std::uint16_t* column(int x, int y) const {
    return cells_.data() + index(x, y, 0);
  }

  /// Maintained incrementally by `commit`.
  const HeightField& heightfield() const { return heightfield_; }
  int height() const { return height_; }

  /// True when the template's bounding cells at `offset` lie inside the grid
  /// and all its occupied voxels are free.
  bool fits(const VoxelTemplate& t, const Voxel& offset) const;

  /// Marks the template's voxels with `label` (must fit).
  void commit(const VoxelTemplate& t, const Voxel& offset, std::uint16_t label);

  std::int64_t occupied_count() const;

 private:
  std::array<int, 3> dims_;
  double voxel_size_;
  std::vector<std::uint16_t> cells_;
  HeightField heightfield_;
  int height_ = 0;
};

/// Height field recomputed from the occupancy alone.
HeightField compute_heightfield(const VoxelGrid& grid);

enum class VoxelClass { kOccupied, kHole, kSlot };

struct HoleRegion {
  int id = 0;
  std::int64_t volume = 0;
  Voxel lo{0, 0, 0}, hi{0, 0, 0};  // inclusive bounding box
  std::vector<Voxel> voxels;       // sorted by (z, y, x)

  bool operator==(const HoleRegion&) const = default;
};

/// Free voxels split into holes (some occupied voxel above in the same
/// column) and slots (everything above free). Holes are grouped into
/// maximal 6-connected regions numbered in scan order.
struct HoleLabels {
  /// Maximal free interval [begin, end) of a column below its height.
  struct Run {
    int begin = 0, end = 0;
    int region = 0;
    bool operator==(const Run&) const = default;
  };

  int nx = 0, ny = 0;
  std::vector<int> height;                  // per column, as the height field
  std::vector<std::uint32_t> column_start;  // into `runs`, size nx*ny+1
  std::vector<Run> runs;                    // per column, bottom to top
  std::vector<HoleRegion> regions;

  /// Region id of a hole voxel, -1 for slots, -2 for occupied voxels.
  int region_at(int x, int y, int z) const;
  /// True when [begin, end) of column (x, y) lies in one run of `region`.
  bool span_in_region(int x, int y, int begin, int end, int region) const;
  VoxelClass classify(int x, int y, int z) const;
  bool operator==(const HoleLabels& o) const = default;
};

HoleLabels classify_free_voxels(const VoxelGrid& grid);

/// True when the anchor at `v` keeps the template's bounding cells inside
/// the region's bounding box.
bool anchor_fits_hole(const HoleRegion& region, const VoxelTemplate& t,
                      const Voxel& v);

/// Cheap necessary condition: enough volume and a large enough bounding box.
bool hole_can_hold(const HoleRegion& region, const VoxelTemplate& t);

/// Per hole region, the voxels where the template's anchor may sit so that
/// its bounding cells stay inside the region's bounding box.
std::vector<std::vector<Voxel>> shrink_holes(const HoleLabels& holes,
                                             const VoxelTemplate& t);

/// Sum over the template's footprint columns of the gap between the part's
/// lowest voxel and the height field, each column floored at 0.
std::int64_t underlying_free_volume(const VoxelTemplate& t,
                                    const Voxel& offset,
                                    const HeightField& heightfield);

/// height_increase * grid volume + underlying_free_volume, in 64-bit
/// integers; throws Overflow when the product does not fit.
std::int64_t placement_cost(std::int64_t height_increase,
                            std::int64_t underlying_free_volume,
                            const std::array<int, 3>& grid_dims);

/// General-position rasterization of tetrahedra already mapped into grid
/// coordinates (model units, grid corner at the origin).
struct RasterResult {
  enum class Status { kOk, kCollision, kOutOfBounds };
  Status status = Status::kOk;
  std::vector<Voxel> voxels;
};

RasterResult rasterize(std::span<const TetPoints> tets,
                       const RigidTransform& transform,
                       const VoxelGrid& grid);

}  // namespace splitpack
