#include "splitpack/tetmesh.hpp"

#include "splitpack/convex_hull.hpp"
#include "splitpack/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace splitpack {

namespace {

struct FacetKey {
  std::array<std::uint32_t, 3> v;
  bool operator==(const FacetKey&) const = default;
};

struct FacetHash {
  std::size_t operator()(const FacetKey& k) const noexcept {
    std::uint64_t h = k.v[0];
    h = h * 0x9e3779b97f4a7c15ULL ^ k.v[1];
    h = h * 0x9e3779b97f4a7c15ULL ^ k.v[2];
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

FacetKey key_of(const Triangle& t) {
  FacetKey k{t};
  std::sort(k.v.begin(), k.v.end());
  return k;
}

/// Reads whitespace-separated tokens, skipping '#' comments.
class TokenReader {
 public:
  explicit TokenReader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::vector<std::string> row;
      std::string tok;
      while (ls >> tok) row.push_back(tok);
      if (!row.empty()) rows_.push_back(std::move(row));
    }
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  long long integer(std::size_t r, std::size_t c) const {
    const std::string& tok = field(r, c);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) fail(r, "expected an integer, got '" + tok + "'");
    return v;
  }

  double real(std::size_t r, std::size_t c) const {
    const std::string& tok = field(r, c);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) fail(r, "expected a number, got '" + tok + "'");
    return v;
  }

  [[noreturn]] void fail(std::size_t r, const std::string& msg) const {
    throw ParseError(path_.string() + ": record " + std::to_string(r) + ": " +
                     msg);
  }

 private:
  const std::string& field(std::size_t r, std::size_t c) const {
    if (r >= rows_.size()) fail(r, "unexpected end of file");
    if (c >= rows_[r].size()) fail(r, "missing field");
    return rows_[r][c];
  }

  std::filesystem::path path_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

TetMesh::TetMesh(std::vector<Point3> vertices, std::vector<Tet> tets)
    : vertices_(std::move(vertices)), tets_(std::move(tets)) {
  const Aabb box = bounding_box(vertices_);
  const double scale = box.empty() ? 0.0 : box.extents().norm();
  const double min_volume = 1e-15 * scale * scale * scale;

  volumes_.reserve(tets_.size());
  std::unordered_set<FacetKey, FacetHash> unused;
  std::vector<std::array<std::uint32_t, 4>> sorted;
  sorted.reserve(tets_.size());
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    for (std::uint32_t v : tets_[t]) {
      if (v >= vertices_.size())
        throw MeshError("tet " + std::to_string(t) + " references vertex " +
                        std::to_string(v) + " out of range");
    }
    const auto& e = tets_[t];
    const double vol = splitpack::tet_volume(vertices_[e[0]], vertices_[e[1]],
                                             vertices_[e[2]], vertices_[e[3]]);
    if (!(vol > min_volume))
      throw DegenerateTet(t, "tet " + std::to_string(t) + " has zero volume");
    volumes_.push_back(vol);
    auto s = e;
    std::sort(s.begin(), s.end());
    sorted.push_back(s);
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw MeshError("mesh contains duplicated tetrahedra");
}

std::array<Point3, 4> TetMesh::tet_points(TetIndex t) const {
  const auto& e = tets_[t];
  return {vertices_[e[0]], vertices_[e[1]], vertices_[e[2]], vertices_[e[3]]};
}

Point3 TetMesh::tet_centroid(TetIndex t) const {
  const auto p = tet_points(t);
  return (p[0] + p[1] + p[2] + p[3]) / 4.0;
}

double TetMesh::volume() const {
  double v = 0;
  for (double x : volumes_) v += x;
  return v;
}

double TetMesh::volume(std::span<const TetIndex> tets) const {
  double v = 0;
  for (TetIndex t : tets) v += volumes_[t];
  return v;
}

std::vector<Point3> TetMesh::points_of(std::span<const TetIndex> tets) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tets.size() * 4);
  for (TetIndex t : tets)
    for (std::uint32_t v : tets_[t]) ids.push_back(v);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Point3> out;
  out.reserve(ids.size());
  for (std::uint32_t v : ids) out.push_back(vertices_[v]);
  return out;
}

TetMesh load_tetmesh(const std::filesystem::path& node_path,
                     const std::filesystem::path& ele_path) {
  const TokenReader node(node_path);
  if (node.size() == 0) node.fail(0, "empty file");
  const long long n = node.integer(0, 0);
  if (n <= 0) node.fail(0, "no vertices declared");
  if (node.row(0).size() > 1 && node.integer(0, 1) != 3)
    node.fail(0, "only 3D meshes are supported");
  if (node.size() < static_cast<std::size_t>(n) + 1)
    node.fail(node.size(), "fewer vertices than declared");

  const long long base = node.integer(1, 0);
  if (base != 0 && base != 1) node.fail(1, "first index must be 0 or 1");
  std::vector<Point3> vertices(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const std::size_t r = static_cast<std::size_t>(i) + 1;
    const long long idx = node.integer(r, 0) - base;
    if (idx != i) node.fail(r, "vertex indices must be consecutive");
    vertices[i] = Point3(node.real(r, 1), node.real(r, 2), node.real(r, 3));
    if (!vertices[i].allFinite()) node.fail(r, "non-finite coordinate");
  }

  const TokenReader ele(ele_path);
  if (ele.size() == 0) ele.fail(0, "empty file");
  const long long m = ele.integer(0, 0);
  if (m <= 0) ele.fail(0, "no tetrahedra declared");
  if (ele.row(0).size() > 1 && ele.integer(0, 1) < 4)
    ele.fail(0, "elements must have at least 4 nodes");
  if (ele.size() < static_cast<std::size_t>(m) + 1)
    ele.fail(ele.size(), "fewer tetrahedra than declared");
  std::vector<Tet> tets(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    const std::size_t r = static_cast<std::size_t>(i) + 1;
    for (int k = 0; k < 4; ++k) {
      const long long v = ele.integer(r, 1 + k) - base;
      if (v < 0 || v >= n) ele.fail(r, "vertex index out of range");
      tets[i][k] = static_cast<std::uint32_t>(v);
    }
  }
  return TetMesh(std::move(vertices), std::move(tets));
}

TetMesh load_tetmesh(const std::filesystem::path& any_path) {
  std::filesystem::path base = any_path;
  const auto ext = base.extension();
  if (ext == ".node" || ext == ".ele") base.replace_extension();
  std::filesystem::path node = base, ele = base;
  node += ".node";
  ele += ".ele";
  return load_tetmesh(node, ele);
}

void save_tetmesh(const TetMesh& mesh, const std::filesystem::path& node_path,
                  const std::filesystem::path& ele_path) {
  std::ofstream node(node_path);
  if (!node) throw IoError("cannot write " + node_path.string());
  node.precision(17);
  node << mesh.vertices().size() << " 3 0 0\n";
  for (std::size_t i = 0; i < mesh.vertices().size(); ++i) {
    const auto& p = mesh.vertices()[i];
    node << i + 1 << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  std::ofstream ele(ele_path);
  if (!ele) throw IoError("cannot write " + ele_path.string());
  ele << mesh.num_tets() << " 4 0\n";
  for (std::size_t i = 0; i < mesh.num_tets(); ++i) {
    const auto& t = mesh.tets()[i];
    ele << i + 1 << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1
        << ' ' << t[3] + 1 << '\n';
  }
}

double mesh_volume(const TetMesh& mesh) { return mesh.volume(); }

std::array<Triangle, 4> tet_facets(const TetMesh& mesh, TetIndex t) {
  const Tet& e = mesh.tets()[t];
  const auto& v = mesh.vertices();
  std::array<Triangle, 4> out;
  for (int opp = 0; opp < 4; ++opp) {
    Triangle tri;
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != opp) tri[k++] = e[i];
    const Vec3 n = (v[tri[1]] - v[tri[0]]).cross(v[tri[2]] - v[tri[0]]);
    if (n.dot(v[e[opp]] - v[tri[0]]) > 0) std::swap(tri[1], tri[2]);
    out[opp] = tri;
  }
  return out;
}

DualGraph build_dual_graph(const TetMesh& mesh) {
  DualGraph g;
  g.neighbors.resize(mesh.num_tets());
  std::unordered_map<FacetKey, std::vector<TetIndex>, FacetHash> owners;
  owners.reserve(mesh.num_tets() * 4);
  for (TetIndex t = 0; t < mesh.num_tets(); ++t)
    for (const Triangle& f : tet_facets(mesh, t)) owners[key_of(f)].push_back(t);
  for (const auto& [key, tets] : owners) {
    for (std::size_t i = 0; i < tets.size(); ++i)
      for (std::size_t j = i + 1; j < tets.size(); ++j)
        g.arcs.emplace_back(std::min(tets[i], tets[j]),
                            std::max(tets[i], tets[j]));
  }
  std::sort(g.arcs.begin(), g.arcs.end());
  g.arcs.erase(std::unique(g.arcs.begin(), g.arcs.end()), g.arcs.end());
  for (const auto& [a, b] : g.arcs) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& n : g.neighbors) std::sort(n.begin(), n.end());
  return g;
}

std::vector<std::vector<TetIndex>> connected_components(const TetMesh& mesh,
                                                        const DualGraph& dual) {
  std::vector<int> label(mesh.num_tets(), -1);
  std::vector<std::vector<TetIndex>> out;
  for (TetIndex seed = 0; seed < mesh.num_tets(); ++seed) {
    if (label[seed] >= 0) continue;
    const int id = static_cast<int>(out.size());
    std::vector<TetIndex> comp{seed};
    label[seed] = id;
    for (std::size_t k = 0; k < comp.size(); ++k) {
      for (TetIndex n : dual.neighbors[comp[k]]) {
        if (label[n] < 0) {
          label[n] = id;
          comp.push_back(n);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Triangle> boundary_surface(const TetMesh& mesh,
                                       std::span<const TetIndex> tets) {
  std::unordered_map<FacetKey, std::pair<int, Triangle>, FacetHash> count;
  std::vector<FacetKey> order;
  for (TetIndex t : tets) {
    for (const Triangle& f : tet_facets(mesh, t)) {
      const FacetKey k = key_of(f);
      auto [it, inserted] = count.try_emplace(k, 0, f);
      if (inserted) order.push_back(k);
      ++it->second.first;
    }
  }
  std::vector<Triangle> out;
  for (const FacetKey& k : order) {
    const auto& [n, tri] = count.at(k);
    if (n == 1) out.push_back(tri);
  }
  return out;
}

std::vector<Triangle> shared_facets(const TetMesh& mesh,
                                    std::span<const TetIndex> a,
                                    std::span<const TetIndex> b) {
  std::unordered_set<FacetKey, FacetHash> in_b;
  for (TetIndex t : b)
    for (const Triangle& f : tet_facets(mesh, t)) in_b.insert(key_of(f));
  std::vector<Triangle> out;
  for (TetIndex t : a)
    for (const Triangle& f : tet_facets(mesh, t))
      if (in_b.count(key_of(f))) out.push_back(f);
  return out;
}

PartRef PartRef::from_tets(const TetMesh& mesh, std::vector<TetIndex> tets,
                           double epsilon) {
  if (tets.empty()) throw Error("a part needs at least one tetrahedron");
  std::sort(tets.begin(), tets.end());
  tets.erase(std::unique(tets.begin(), tets.end()), tets.end());
  PartRef p;
  p.volume_ = mesh.volume(tets);
  p.tets_ = std::move(tets);
  const std::vector<Point3> pts = mesh.points_of(p.tets_);
  p.hull_points_ = hull_vertices(pts);
  p.mbb_ = approximate_mbb(p.hull_points_, epsilon);
  return p;
}

PartRef PartRef::merge(const PartRef& a, const PartRef& b, double epsilon) {
  PartRef p;
  p.tets_.reserve(a.tets_.size() + b.tets_.size());
  std::merge(a.tets_.begin(), a.tets_.end(), b.tets_.begin(), b.tets_.end(),
             std::back_inserter(p.tets_));
  p.volume_ = a.volume_ + b.volume_;
  std::vector<Point3> pts = a.hull_points_;
  pts.insert(pts.end(), b.hull_points_.begin(), b.hull_points_.end());
  p.hull_points_ = hull_vertices(pts);
  p.mbb_ = approximate_mbb(p.hull_points_, epsilon);
  return p;
}

std::vector<Triangle> part_boundary_surface(const PartRef& part,
                                            const TetMesh& mesh) {
  return boundary_surface(mesh, part.tets());
}

}  // namespace splitpack
