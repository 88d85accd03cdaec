#include "splitpack/pipeline.hpp"

#include "splitpack/convex_hull.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <iterator>

namespace splitpack {
namespace {

constexpr std::size_t kMaxRefineRounds = 16;

std::vector<TetIndex> intersect(std::span<const TetIndex> a,
                                std::span<const TetIndex> b) {
  std::vector<TetIndex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

bool split_before(const SegmentationTree& tree, NodeId x, NodeId y) {
  const auto& a = tree.node(x);
  const auto& b = tree.node(y);
  if (a.aboxiness != b.aboxiness) return a.aboxiness > b.aboxiness;
  if (a.part.volume() != b.part.volume())
    return a.part.volume() > b.part.volume();
  return x < y;
}

// Splits a part along the tree. Elements that refinement moved in from
// other subtrees join the child they are connected to. When one child holds
// none of the part's own elements the split descends into the other child.
std::optional<std::pair<ActivePart, ActivePart>> split_part(
    const SegmentationTree& tree, const DualGraph& dual,
    const ActivePart& part) {
  NodeId n = part.node;
  while (!tree.node(n).is_leaf()) {
    const auto [c0, c1] = *tree.node(n).children;
    ActivePart a{c0, intersect(part.tets, tree.node(c0).part.tets())};
    ActivePart b{c1, intersect(part.tets, tree.node(c1).part.tets())};
    if (a.tets.empty() && b.tets.empty()) return std::nullopt;
    if (a.tets.empty()) {
      n = c1;
      continue;
    }
    if (b.tets.empty()) {
      n = c0;
      continue;
    }
    if (a.tets.size() + b.tets.size() < part.tets.size()) {
      std::unordered_map<TetIndex, int> side;
      for (TetIndex t : part.tets) side[t] = -1;
      std::deque<TetIndex> queue;
      for (TetIndex t : a.tets) side[t] = 0, queue.push_back(t);
      for (TetIndex t : b.tets) side[t] = 1, queue.push_back(t);
      while (!queue.empty()) {
        const TetIndex t = queue.front();
        queue.pop_front();
        for (TetIndex u : dual.neighbors[t]) {
          auto it = side.find(u);
          if (it != side.end() && it->second < 0) {
            it->second = side[t];
            queue.push_back(u);
          }
        }
      }
      a.tets.clear();
      b.tets.clear();
      for (TetIndex t : part.tets) (side[t] == 1 ? b : a).tets.push_back(t);
    }
    return std::pair{std::move(a), std::move(b)};
  }
  return std::nullopt;
}

Point3 centroid_of(const TetMesh& mesh, std::span<const TetIndex> tets) {
  Point3 c = Point3::Zero();
  double v = 0;
  for (TetIndex t : tets) {
    c += mesh.tet_volume(t) * mesh.tet_centroid(t);
    v += mesh.tet_volume(t);
  }
  return v > 0 ? Point3(c / v) : c;
}

double diameter(const TetMesh& mesh, TetIndex t) {
  const auto p = mesh.tet_points(t);
  double d = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d = std::max(d, (p[i] - p[j]).norm());
  return d;
}

}  // namespace

NodeId select_split_node(const SegmentationTree& tree,
                         std::span<const NodeId> active) {
  NodeId pick = kNoNode;
  for (NodeId id : active) {
    if (tree.node(id).is_leaf()) continue;
    if (pick == kNoNode || split_before(tree, id, pick)) pick = id;
  }
  if (pick == kNoNode) throw NoSplittableNode("every active part is a leaf");
  return pick;
}

bool heightfield_check(std::span<const Vec3> normals) {
  if (normals.empty()) return true;
  std::vector<Point3> pts;
  for (const Vec3& n : normals)
    if (n.norm() > 0) pts.push_back(n.normalized());
  if (pts.empty()) return true;
  ConvexHull hull;
  try {
    hull = convex_hull(pts);
  } catch (const DegenerateInput&) {
    // Flat hull: the normal of its plane is orthogonal to every facet
    // normal, a (degenerate) separating direction.
    return true;
  }
  constexpr double kTol = 1e-9;
  for (std::size_t f = 0; f < hull.faces.size(); ++f) {
    const Vec3 n = hull.face_normal(f);
    const Point3& p = hull.vertices[hull.faces[f][0]];
    if (n.dot(Point3::Zero() - p) >= -kTol) return true;
  }
  return false;
}

std::vector<Vec3> facet_normals(const TetMesh& mesh,
                                std::span<const Triangle> triangles) {
  std::vector<Vec3> out;
  out.reserve(triangles.size());
  const auto& v = mesh.vertices();
  for (const Triangle& t : triangles) {
    const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
    if (n.norm() > 0) out.push_back(n.normalized());
  }
  return out;
}

RefineResult plane_refine(const TetMesh& mesh, const DualGraph& dual,
                          std::span<const TetIndex> a,
                          std::span<const TetIndex> b) {
  RefineResult r;
  r.a.assign(a.begin(), a.end());
  r.b.assign(b.begin(), b.end());
  std::sort(r.a.begin(), r.a.end());
  std::sort(r.b.begin(), r.b.end());
  if (r.a.empty() || r.b.empty())
    throw DegenerateSplit("refinement needs two non-empty parts");

  std::unordered_map<TetIndex, int> side;
  for (TetIndex t : r.a) side[t] = 0;
  for (TetIndex t : r.b) side[t] = 1;

  for (; r.rounds < kMaxRefineRounds; ++r.rounds) {
    const auto shared = shared_facets(mesh, r.a, r.b);
    if (shared.empty()) break;
    std::vector<Point3> pts;
    for (const Triangle& tri : shared)
      for (std::uint32_t v : tri) pts.push_back(mesh.vertices()[v]);
    std::sort(pts.begin(), pts.end(), [](const Point3& p, const Point3& q) {
      return std::lexicographical_compare(p.data(), p.data() + 3, q.data(),
                                          q.data() + 3);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    r.plane = fit_plane(pts);
    if (r.plane.signed_distance(centroid_of(mesh, r.a)) > 0) {
      r.plane.normal = -r.plane.normal;
      r.plane.offset = -r.plane.offset;
    }

    double band = 0;
    for (const Point3& p : pts)
      band = std::max(band, std::abs(r.plane.signed_distance(p)));
    std::deque<TetIndex> queue;
    std::unordered_map<TetIndex, bool> seen;
    double widest = 0;
    for (TetIndex t : r.a)
      for (TetIndex u : dual.neighbors[t]) {
        auto it = side.find(u);
        if (it == side.end() || it->second != 1) continue;
        for (TetIndex w : {t, u})
          if (!seen[w]) {
            seen[w] = true;
            queue.push_back(w);
            widest = std::max(widest, diameter(mesh, w));
          }
      }
    band += widest;

    std::vector<std::pair<TetIndex, int>> moves;
    while (!queue.empty()) {
      const TetIndex t = queue.front();
      queue.pop_front();
      const double d = r.plane.signed_distance(mesh.tet_centroid(t));
      const int want = d < 0 ? 0 : (d > 0 ? 1 : side[t]);
      if (want != side[t]) moves.emplace_back(t, want);
      for (TetIndex u : dual.neighbors[t]) {
        if (!side.contains(u) || seen[u]) continue;
        if (std::abs(r.plane.signed_distance(mesh.tet_centroid(u))) > band)
          continue;
        seen[u] = true;
        queue.push_back(u);
      }
    }
    if (moves.empty()) break;
    std::size_t to_a = 0, to_b = 0;
    for (const auto& [t, s] : moves) (s == 0 ? to_a : to_b)++;
    if (r.a.size() + to_a == to_b || r.b.size() + to_b == to_a)
      throw DegenerateSplit("refinement would leave a part empty");
    for (const auto& [t, s] : moves) side[t] = s;
    r.moved += moves.size();
    r.a.clear();
    r.b.clear();
    for (const auto& [t, s] : side) (s == 0 ? r.a : r.b).push_back(t);
    std::sort(r.a.begin(), r.a.end());
    std::sort(r.b.begin(), r.b.end());
  }
  return r;
}

AssemblyPlan assembly_plan(const SegmentationTree& tree,
                           std::span<const NodeId> active) {
  std::vector<char> is_active(tree.size(), 0);
  for (NodeId id : active) is_active.at(id) = 1;
  // Representative group of each subtree, computed children first.
  std::vector<NodeId> rep(tree.size(), kNoNode);
  std::vector<std::pair<std::size_t, AssemblyStep>> steps;
  std::vector<std::pair<NodeId, bool>> stack{{tree.root(), false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    const auto& node = tree.node(n);
    if (is_active[n]) {
      rep[n] = n;
      continue;
    }
    if (node.is_leaf()) continue;
    const auto [c0, c1] = *node.children;
    if (!expanded) {
      stack.push_back({n, true});
      stack.push_back({c1, false});
      stack.push_back({c0, false});
      continue;
    }
    if (rep[c0] != kNoNode && rep[c1] != kNoNode) {
      steps.push_back({tree.depth(n), {rep[c0], rep[c1], n}});
      rep[n] = n;
    } else {
      rep[n] = rep[c0] != kNoNode ? rep[c0] : rep[c1];
    }
  }
  std::stable_sort(steps.begin(), steps.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first
                              : x.second.group < y.second.group;
  });
  AssemblyPlan plan;
  for (const auto& [depth, step] : steps) plan.steps.push_back(step);
  return plan;
}

SplitPackResult split_and_pack(const TetMesh& mesh, const SegmentationTree& tree,
                               const SplitPackConfig& config) {
  if (config.n_max < 1) throw ConfigError("n_max must be >= 1");
  if (!(config.target > 0 && config.target <= 1))
    throw ConfigError("target efficiency must be in (0, 1]");
  if (tree.num_leaves() != mesh.num_tets())
    throw ConfigError("tree was not built from this mesh");
  const auto start = std::chrono::steady_clock::now();
  const DualGraph dual = build_dual_graph(mesh);

  SplitPackResult result;
  result.vol_max = mesh.volume() / config.target;
  std::vector<ActivePart> active{{tree.root(), tree.node(tree.root()).part.tets()}};

  auto record = [&](PackingResult packing) {
    HistoryEntry e;
    e.n_parts = active.size();
    e.efficiency = packing.efficiency;
    e.box = packing.box_extents;
    e.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    result.history.push_back(e);
    if (config.on_iteration) config.on_iteration(e);
    if (result.history.size() == 1 ||
        packing.efficiency > result.packing.efficiency) {
      result.packing = std::move(packing);
      result.parts = active;
      result.best_iteration = result.history.size() - 1;
    }
  };
  auto finish = [&]() -> SplitPackResult& {
    std::vector<NodeId> nodes;
    for (const ActivePart& p : result.parts) nodes.push_back(p.node);
    result.assembly = assembly_plan(tree, nodes);
    return result;
  };

  record(bounding_box_packing(PackPart::from_mesh(mesh)));
  result.initial_efficiency = result.history.front().efficiency;
  double box_volume = result.packing.box_volume();

  PackerConfig packer = config.packer;
  packer.container = ContainerMode::kAssembled;
  std::size_t n_max = config.n_max;
  while (box_volume > result.vol_max) {
    if (active.size() >= n_max) {
      if (config.interactive && config.prompt) {
        const auto more = config.prompt(result);
        if (more && *more > active.size()) {
          n_max = *more;
          continue;
        }
      }
      throw TargetUnreachable("part budget exhausted before the target",
                              std::move(finish()));
    }

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (!tree.node(active[i].node).is_leaf()) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return split_before(tree, active[x].node, active[y].node);
    });
    std::optional<std::pair<ActivePart, ActivePart>> children;
    std::size_t which = 0;
    for (std::size_t i : order) {
      children = split_part(tree, dual, active[i]);
      if (children) {
        which = i;
        break;
      }
    }
    if (!children)
      throw TargetUnreachable("no splittable part left", std::move(finish()));

    auto& [a, b] = *children;
    try {
      RefineResult refined = plane_refine(mesh, dual, a.tets, b.tets);
      a.tets = std::move(refined.a);
      b.tets = std::move(refined.b);
    } catch (const DegenerateSplit& e) {
      result.warnings.push_back("split of node " +
                                std::to_string(active[which].node) +
                                " kept unrefined: " + e.what());
    }
    active[which] = std::move(a);
    active.insert(active.begin() + static_cast<std::ptrdiff_t>(which) + 1,
                  std::move(b));

    std::vector<PackPart> parts;
    parts.reserve(active.size());
    for (const ActivePart& p : active)
      parts.push_back(PackPart::from_mesh(mesh, p.tets));
    PackingResult packing = pack(parts, packer);
    box_volume = packing.box_volume();
    record(std::move(packing));
  }
  result.target_reached = true;
  return finish();
}

}  // namespace splitpack
