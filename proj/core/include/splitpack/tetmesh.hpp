#pragma once

#include "splitpack/geometry.hpp"
#include "splitpack/mbb.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace splitpack {

using TetIndex = std::uint32_t;
using Tet = std::array<std::uint32_t, 4>;
using Triangle = std::array<std::uint32_t, 3>;

/// Immutable tetrahedral mesh. Construction validates that indices are in
/// range, that no element is degenerate and that no element is repeated.
class TetMesh {
 public:
  TetMesh() = default;
  TetMesh(std::vector<Point3> vertices, std::vector<Tet> tets);

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<Tet>& tets() const { return tets_; }
  std::size_t num_tets() const { return tets_.size(); }
  bool empty() const { return tets_.empty(); }

  std::array<Point3, 4> tet_points(TetIndex t) const;
  double tet_volume(TetIndex t) const { return volumes_[t]; }
  Point3 tet_centroid(TetIndex t) const;

  /// Sum of element volumes.
  double volume() const;
  double volume(std::span<const TetIndex> tets) const;

  /// Distinct vertex positions referenced by the given elements.
  std::vector<Point3> points_of(std::span<const TetIndex> tets) const;

 private:
  std::vector<Point3> vertices_;
  std::vector<Tet> tets_;
  std::vector<double> volumes_;
};

/// Reads a TetGen-style ASCII .node/.ele pair. Index base (0 or 1) is taken
/// from the first index of the .node file.
TetMesh load_tetmesh(const std::filesystem::path& node_path,
                     const std::filesystem::path& ele_path);

/// Accepts "name", "name.node" or "name.ele" and loads the pair.
TetMesh load_tetmesh(const std::filesystem::path& any_path);

/// Writes a 1-based .node/.ele pair.
void save_tetmesh(const TetMesh& mesh, const std::filesystem::path& node_path,
                  const std::filesystem::path& ele_path);

double mesh_volume(const TetMesh& mesh);

/// Facet adjacency of the tetrahedra: one node per element, one arc per
/// shared triangular facet.
struct DualGraph {
  std::vector<std::vector<TetIndex>> neighbors;
  std::vector<std::pair<TetIndex, TetIndex>> arcs;  // first < second

  std::size_t num_nodes() const { return neighbors.size(); }
  std::size_t num_arcs() const { return arcs.size(); }
};

DualGraph build_dual_graph(const TetMesh& mesh);

/// Connected components of the dual graph, each sorted, ordered by their
/// smallest element.
std::vector<std::vector<TetIndex>> connected_components(const TetMesh& mesh,
                                                        const DualGraph& dual);

/// The four facets of a tet, each oriented outward.
std::array<Triangle, 4> tet_facets(const TetMesh& mesh, TetIndex t);

/// Facets appearing in exactly one element of the set, oriented outward.
std::vector<Triangle> boundary_surface(const TetMesh& mesh,
                                       std::span<const TetIndex> tets);

/// Facets shared between an element of `a` and an element of `b`, oriented
/// outward from `a`.
std::vector<Triangle> shared_facets(const TetMesh& mesh,
                                    std::span<const TetIndex> a,
                                    std::span<const TetIndex> b);

/// A cluster of elements with cached volume, hull points and bounding box.
class PartRef {
 public:
  PartRef() = default;

  static PartRef from_tets(const TetMesh& mesh, std::vector<TetIndex> tets,
                           double epsilon = kSegmentationEpsilon);

  /// Union of two disjoint parts. The hull of the union is computed from the
  /// two cached hull point sets.
  static PartRef merge(const PartRef& a, const PartRef& b,
                       double epsilon = kSegmentationEpsilon);

  const std::vector<TetIndex>& tets() const { return tets_; }
  TetIndex min_tet() const { return tets_.front(); }
  double volume() const { return volume_; }
  const std::vector<Point3>& hull_points() const { return hull_points_; }
  const OrientedBox& mbb() const { return mbb_; }

 private:
  std::vector<TetIndex> tets_;  // sorted
  double volume_ = 0.0;
  std::vector<Point3> hull_points_;
  OrientedBox mbb_;
};

std::vector<Triangle> part_boundary_surface(const PartRef& part,
                                            const TetMesh& mesh);

}  // namespace splitpack
