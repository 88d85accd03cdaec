#pragma once

#include "splitpack/tetmesh.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace splitpack {

/// One named object of a Wavefront OBJ file.
struct ObjObject {
  std::string name;
  std::vector<Point3> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::array<std::uint32_t, 2>> lines;
};

/// Boundary triangles of the given elements, mapped through `placement`.
ObjObject part_object(const TetMesh& mesh, std::span<const TetIndex> tets,
                      const RigidTransform& placement, std::string name);

/// The 12 edges of the box [0, extents], without faces.
ObjObject box_wireframe(const Vec3& extents, std::string name = "container");

void write_obj(std::ostream& out, std::span<const ObjObject> objects);
void write_obj(const std::filesystem::path& path,
               std::span<const ObjObject> objects);

}  // namespace splitpack
