#include "splitpack/segmentation.hpp"

#include "splitpack/errors.hpp"

#include <algorithm>
#include <memory>
#include <queue>
#include <set>

namespace splitpack {

double boxiness(const PartRef& part) {
  const double box = part.mbb().volume();
  if (!(box > 0.0)) throw DegenerateBox("part has a flat bounding box");
  return part.volume() / box;
}

double aboxiness(const PartRef& part) {
  return part.mbb().volume() - part.volume();
}

ContractionCost contraction_cost(const PartRef& a, const PartRef& b,
                                 CostMetric metric, double epsilon) {
  ContractionCost c;
  c.merged = PartRef::merge(a, b, epsilon);
  if (metric == CostMetric::kAbsoluteAboxiness) {
    c.cost = aboxiness(c.merged);
  } else {
    const double box = c.merged.mbb().volume();
    c.cost = box > 0 ? 1.0 - c.merged.volume() / box : 1.0;
  }
  return c;
}

std::size_t SegmentationTree::depth(NodeId id) const {
  std::size_t d = 0;
  for (NodeId n = id; nodes_.at(n).parent != kNoNode; n = nodes_[n].parent) ++d;
  return d;
}

std::size_t SegmentationTree::height() const {
  std::size_t h = 0;
  for (NodeId i = 0; i < num_leaves_; ++i) h = std::max(h, depth(i));
  return h;
}

class HierarchyBuilder {
 public:
  HierarchyBuilder(const TetMesh& mesh, const HierarchyOptions& options)
      : mesh_(mesh), options_(options) {}

  SegmentationTree run() {
    const std::size_t n = mesh_.num_tets();
    tree_.num_leaves_ = n;
    tree_.nodes_.reserve(2 * n);
    for (TetIndex t = 0; t < n; ++t) {
      SegmentationNode leaf;
      leaf.id = t;
      leaf.part = PartRef::from_tets(mesh_, {t}, options_.epsilon);
      leaf.aboxiness = aboxiness(leaf.part);
      tree_.nodes_.push_back(std::move(leaf));
    }
    alive_.assign(n, true);
    neighbors_.resize(n);
    const DualGraph dual = build_dual_graph(mesh_);
    for (const auto& [a, b] : dual.arcs) {
      neighbors_[a].insert(b);
      neighbors_[b].insert(a);
    }
    for (const auto& [a, b] : dual.arcs) push_edge(a, b);

    while (!heap_.empty()) {
      Entry e = heap_.top();
      heap_.pop();
      if (!alive_[e.a] || !alive_[e.b]) continue;  // stale
      contract(e.a, e.b, e.cost, std::move(*e.merged), false);
    }

    join_components();
    tree_.root_ = static_cast<NodeId>(tree_.nodes_.size() - 1);
    return std::move(tree_);
  }

 private:
  struct Entry {
    double cost;
    TetIndex min_a, min_b;
    NodeId a, b;
    std::shared_ptr<PartRef> merged;
  };
  struct EntryOrder {
    // std::priority_queue pops the largest; invert for a min-heap.
    bool operator()(const Entry& x, const Entry& y) const {
      if (x.cost != y.cost) return x.cost > y.cost;
      if (x.min_a != y.min_a) return x.min_a > y.min_a;
      return x.min_b > y.min_b;
    }
  };

  const PartRef& part(NodeId id) const { return tree_.nodes_[id].part; }

  void push_edge(NodeId a, NodeId b) {
    if (part(b).min_tet() < part(a).min_tet()) std::swap(a, b);
    ContractionCost c =
        contraction_cost(part(a), part(b), options_.metric, options_.epsilon);
    heap_.push({c.cost, part(a).min_tet(), part(b).min_tet(), a, b,
                std::make_shared<PartRef>(std::move(c.merged))});
  }

  std::vector<NodeId> live() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < alive_.size(); ++i)
      if (alive_[i]) out.push_back(i);
    return out;
  }

  NodeId contract(NodeId a, NodeId b, double cost, PartRef merged,
                  bool bridge) {
    if (options_.observer) {
      ContractionEvent ev;
      ev.cost = cost;
      ev.a = a;
      ev.b = b;
      ev.bridges_components = bridge;
      for (NodeId id : live()) ev.live.push_back(&tree_.nodes_[id]);
      options_.observer(ev);
    }
    const auto c = static_cast<NodeId>(tree_.nodes_.size());
    SegmentationNode node;
    node.id = c;
    node.part = std::move(merged);
    node.children = std::array<NodeId, 2>{a, b};
    node.aboxiness = aboxiness(node.part);
    node.cost = cost;
    node.bridges_components = bridge;
    tree_.nodes_.push_back(std::move(node));
    tree_.nodes_[a].parent = c;
    tree_.nodes_[b].parent = c;
    alive_[a] = alive_[b] = false;
    alive_.push_back(true);

    std::set<NodeId> adj;
    for (NodeId x : neighbors_[a]) adj.insert(x);
    for (NodeId x : neighbors_[b]) adj.insert(x);
    adj.erase(a);
    adj.erase(b);
    neighbors_[a].clear();
    neighbors_[b].clear();
    neighbors_.push_back(adj);
    for (NodeId x : adj) {
      neighbors_[x].erase(a);
      neighbors_[x].erase(b);
      neighbors_[x].insert(c);
      push_edge(c, x);
    }
    return c;
  }

  void join_components() {
    std::vector<NodeId> roots = live();
    while (roots.size() > 1) {
      double best_cost = 0;
      std::size_t bi = 0, bj = 0;
      std::optional<PartRef> best;
      for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
          ContractionCost c = contraction_cost(part(roots[i]), part(roots[j]),
                                               options_.metric,
                                               options_.epsilon);
          // `roots` is ordered by min tet, so the first strict minimum wins.
          if (!best || c.cost < best_cost) {
            best_cost = c.cost;
            best = std::move(c.merged);
            bi = i;
            bj = j;
          }
        }
      contract(roots[bi], roots[bj], best_cost, std::move(*best), true);
      roots = live();
      std::sort(roots.begin(), roots.end(), [&](NodeId x, NodeId y) {
        return part(x).min_tet() < part(y).min_tet();
      });
    }
  }

  const TetMesh& mesh_;
  const HierarchyOptions& options_;
  SegmentationTree tree_;
  std::vector<bool> alive_;
  std::vector<std::set<NodeId>> neighbors_;
  std::priority_queue<Entry, std::vector<Entry>, EntryOrder> heap_;
};

SegmentationTree build_hierarchy(const TetMesh& mesh,
                                 const HierarchyOptions& options) {
  if (mesh.empty()) throw Error("cannot segment an empty mesh");
  return HierarchyBuilder(mesh, options).run();
}

std::vector<NodeId> cut_tree(const SegmentationTree& tree,
                             std::span<const NodeId> active, NodeId node) {
  const auto it = std::find(active.begin(), active.end(), node);
  if (it == active.end())
    throw Error("node " + std::to_string(node) + " is not in the active set");
  const SegmentationNode& n = tree.node(node);
  if (n.is_leaf())
    throw LeafSplit("node " + std::to_string(node) + " is a leaf");
  std::vector<NodeId> out(active.begin(), it);
  out.push_back((*n.children)[0]);
  out.push_back((*n.children)[1]);
  out.insert(out.end(), it + 1, active.end());
  return out;
}

std::vector<NodeId> cut_at_count(const SegmentationTree& tree,
                                 std::size_t parts) {
  std::vector<NodeId> active{tree.root()};
  while (active.size() < parts) {
    NodeId pick = kNoNode;
    for (NodeId id : active) {
      const auto& n = tree.node(id);
      if (n.is_leaf()) continue;
      if (pick == kNoNode) {
        pick = id;
        continue;
      }
      const auto& p = tree.node(pick);
      if (n.aboxiness > p.aboxiness ||
          (n.aboxiness == p.aboxiness &&
           (n.part.volume() > p.part.volume() ||
            (n.part.volume() == p.part.volume() && id < pick))))
        pick = id;
    }
    if (pick == kNoNode) break;
    active = cut_tree(tree, active, pick);
  }
  return active;
}

}  // namespace splitpack
