#pragma once

#include "splitpack/tetmesh.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace splitpack {

/// Axis-aligned box split into five tetrahedra (one central, four corners).
TetMesh box_mesh(const Point3& min, const Point3& max);

/// Solid made of the cells (i, j, k) of a regular lattice for which
/// `inside` returns true. Each cell is split into five tetrahedra with
/// alternating parity, so neighbouring cells share conforming facets.
TetMesh cell_solid(const std::array<int, 3>& dims,
                   const std::function<bool(int, int, int)>& inside,
                   double cell_size = 1.0,
                   const Point3& origin = Point3::Zero());

/// Disjoint union of meshes (vertices are not merged).
TetMesh concatenate(std::span<const TetMesh> meshes);

TetMesh transformed(const TetMesh& mesh, const RigidTransform& t);

/// L-shaped solid with a long horizontal arm and a vertical arm,
/// `resolution` cells per unit length.
TetMesh elongated_l_mesh(int resolution = 1);

/// `count` axis-aligned boxes at the origin with edge lengths drawn
/// uniformly from [min_edge, max_edge], each meshed as five tetrahedra.
std::vector<TetMesh> random_boxes(std::size_t count, double min_edge,
                                  double max_edge, std::uint64_t seed);

}  // namespace splitpack
