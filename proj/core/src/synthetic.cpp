#include "splitpack/synthetic.hpp"

#include "splitpack/errors.hpp"
#include "splitpack/rotations.hpp"

#include <map>

namespace splitpack {

namespace {

// Corner c of a unit cell sits at (c & 1, (c >> 1) & 1, (c >> 2) & 1).
constexpr std::array<Tet, 5> kEvenSplit{{
    {0, 3, 5, 6}, {1, 0, 3, 5}, {2, 0, 6, 3}, {4, 0, 5, 6}, {7, 3, 6, 5}}};
constexpr std::array<Tet, 5> kOddSplit{{
    {1, 2, 4, 7}, {0, 1, 4, 2}, {3, 1, 2, 7}, {5, 1, 7, 4}, {6, 2, 4, 7}}};

}  // namespace

TetMesh box_mesh(const Point3& min, const Point3& max) {
  std::vector<Point3> v(8);
  for (int c = 0; c < 8; ++c)
    v[c] = Point3(c & 1 ? max.x() : min.x(), c & 2 ? max.y() : min.y(),
                  c & 4 ? max.z() : min.z());
  std::vector<Tet> tets(kEvenSplit.begin(), kEvenSplit.end());
  return TetMesh(std::move(v), std::move(tets));
}

TetMesh cell_solid(const std::array<int, 3>& dims,
                   const std::function<bool(int, int, int)>& inside,
                   double cell_size, const Point3& origin) {
  std::map<std::array<int, 3>, std::uint32_t> index;
  std::vector<Point3> vertices;
  std::vector<Tet> tets;
  auto vertex = [&](int x, int y, int z) {
    const std::array<int, 3> key{x, y, z};
    auto [it, inserted] =
        index.try_emplace(key, static_cast<std::uint32_t>(vertices.size()));
    if (inserted)
      vertices.push_back(origin + cell_size * Point3(x, y, z));
    return it->second;
  };
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        if (!inside(i, j, k)) continue;
        std::array<std::uint32_t, 8> corner;
        for (int c = 0; c < 8; ++c)
          corner[c] = vertex(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
        const auto& split = (i + j + k) % 2 == 0 ? kEvenSplit : kOddSplit;
        for (const Tet& t : split)
          tets.push_back({corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]});
      }
  return TetMesh(std::move(vertices), std::move(tets));
}

TetMesh concatenate(std::span<const TetMesh> meshes) {
  std::vector<Point3> vertices;
  std::vector<Tet> tets;
  for (const TetMesh& m : meshes) {
    const auto base = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), m.vertices().begin(), m.vertices().end());
    for (Tet t : m.tets()) {
      for (auto& v : t) v += base;
      tets.push_back(t);
    }
  }
  return TetMesh(std::move(vertices), std::move(tets));
}

TetMesh transformed(const TetMesh& mesh, const RigidTransform& t) {
  std::vector<Point3> vertices;
  vertices.reserve(mesh.vertices().size());
  for (const auto& p : mesh.vertices()) vertices.push_back(t.apply(p));
  return TetMesh(std::move(vertices), mesh.tets());
}

TetMesh elongated_l_mesh(int resolution) {
  const int r = std::max(1, resolution);
  const int length = 8 * r, height = 6 * r;
  return cell_solid(
      {length, r, height},
      [r](int i, int, int k) { return k < r || i < r; }, 1.0 / r);
}

std::vector<TetMesh> random_boxes(std::size_t count, double min_edge,
                                  double max_edge, std::uint64_t seed) {
  if (!(min_edge > 0) || !(min_edge <= max_edge))
    throw ConfigError("edge range must satisfy 0 < min <= max");
  std::mt19937_64 rng(derive_seed(seed, "boxes"));
  std::vector<TetMesh> boxes;
  boxes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = uniform_real(rng, min_edge, max_edge);
    const double y = uniform_real(rng, min_edge, max_edge);
    const double z = uniform_real(rng, min_edge, max_edge);
    boxes.push_back(box_mesh(Point3::Zero(), Point3(x, y, z)));
  }
  return boxes;
}

}  // namespace splitpack
