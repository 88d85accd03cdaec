#include "fixtures.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>

namespace fixtures {

TetMesh five_tet_cube() { return box_mesh(Point3::Zero(), Point3::Ones()); }

TetMesh unit_tet() {
  return TetMesh({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)},
                 {Tet{0, 1, 2, 3}});
}

TetMesh two_tets() {
  return TetMesh({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1),
                  Point3(1, 1, 1)},
                 {Tet{0, 1, 2, 3}, Tet{4, 1, 2, 3}});
}

TetMesh two_cube_bar() {
  return cell_solid({2, 1, 1}, [](int, int, int) { return true; });
}

TetMesh l_tricube() {
  return cell_solid({2, 2, 1}, [](int i, int j, int) { return i == 0 || j == 0; });
}

TetMesh hollow_frame(int outer) {
  return cell_solid({outer, outer, 1}, [outer](int i, int j, int) {
    return i == 0 || j == 0 || i == outer - 1 || j == outer - 1;
  });
}

TetMesh hollow_box(int outer) {
  return cell_solid({outer, outer, outer}, [outer](int i, int j, int k) {
    auto edge = [outer](int v) { return v == 0 || v == outer - 1; };
    return edge(i) || edge(j) || edge(k);
  });
}

TetMesh kuhn_solid(const std::array<int, 3>& dims) {
  std::map<std::array<int, 3>, std::uint32_t> index;
  std::vector<Point3> vertices;
  auto vertex = [&](int x, int y, int z) {
    auto [it, inserted] = index.try_emplace({x, y, z}, static_cast<std::uint32_t>(vertices.size()));
    if (inserted) vertices.emplace_back(x, y, z);
    return it->second;
  };
  std::vector<Tet> tets;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          Tet t;
          t[0] = vertex(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            t[s + 1] = vertex(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }
  return TetMesh(std::move(vertices), std::move(tets));
}

PackPart box_part(const Vec3& extents) {
  return PackPart::from_mesh(box_mesh(Point3::Zero(), extents));
}

PackPart random_part(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0, 3.0);
  switch (rng() % 3) {
    case 0:
      return fixtures::box_part(Vec3(u(rng), u(rng), u(rng)));
    case 1: {
      const double a = u(rng);
      PackPart p;
      p.tets.push_back({Point3(0, 0, 0), Point3(2 * a, 0, 0), Point3(0, 2 * a, 0),
                        Point3(0, 0, 2 * a)});
      p.volume = tet_volume(p.tets[0][0], p.tets[0][1], p.tets[0][2], p.tets[0][3]);
      return p;
    }
    default:
      return PackPart::from_mesh(fixtures::l_tricube());
  }
}

RigidTransform random_motion(std::mt19937_64& rng, double max_shift) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis(u(rng), u(rng), u(rng));
  while (axis.norm() < 1e-3) axis = Vec3(u(rng), u(rng), u(rng));
  const double angle = std::acos(-1.0) * u(rng);
  const Eigen::Quaterniond q(Eigen::AngleAxisd(angle, axis.normalized()));
  return {UnitQuaternion(q.w(), q.x(), q.y(), q.z()),
          Vec3(u(rng), u(rng), u(rng)) * max_shift};
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("splitpack_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_mesh(const TetMesh& mesh, const std::filesystem::path& dir,
                                 const std::string& stem) {
  const auto base = dir / stem;
  save_tetmesh(mesh, base.string() + ".node", base.string() + ".ele");
  return base;
}

}  // namespace fixtures
