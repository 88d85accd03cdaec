#include "splitpack/obj.hpp"

#include "splitpack/errors.hpp"

#include <fstream>
#include <unordered_map>

namespace splitpack {

ObjObject part_object(const TetMesh& mesh, std::span<const TetIndex> tets,
                      const RigidTransform& placement, std::string name) {
  ObjObject obj;
  obj.name = std::move(name);
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  for (const Triangle& tri : boundary_surface(mesh, tets)) {
    Triangle out;
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = local.try_emplace(
          tri[k], static_cast<std::uint32_t>(obj.vertices.size()));
      if (inserted)
        obj.vertices.push_back(placement.apply(mesh.vertices()[tri[k]]));
      out[k] = it->second;
    }
    obj.triangles.push_back(out);
  }
  return obj;
}

ObjObject box_wireframe(const Vec3& extents, std::string name) {
  ObjObject obj;
  obj.name = std::move(name);
  for (int c = 0; c < 8; ++c)
    obj.vertices.emplace_back(c & 1 ? extents.x() : 0.0,
                              c & 2 ? extents.y() : 0.0,
                              c & 4 ? extents.z() : 0.0);
  for (std::uint32_t c = 0; c < 8; ++c)
    for (std::uint32_t bit : {1u, 2u, 4u})
      if (!(c & bit)) obj.lines.push_back({c, c | bit});
  return obj;
}

void write_obj(std::ostream& out, std::span<const ObjObject> objects) {
  out.precision(17);
  std::size_t base = 1;
  for (const ObjObject& obj : objects) {
    out << "o " << obj.name << '\n';
    for (const auto& v : obj.vertices)
      out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : obj.triangles)
      out << "f " << t[0] + base << ' ' << t[1] + base << ' ' << t[2] + base
          << '\n';
    for (const auto& l : obj.lines)
      out << "l " << l[0] + base << ' ' << l[1] + base << '\n';
    base += obj.vertices.size();
  }
}

void write_obj(const std::filesystem::path& path,
               std::span<const ObjObject> objects) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_obj(out, objects);
}

}  // namespace splitpack
