#pragma once

#include "splitpack/tetmesh.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace splitpack {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

/// Vol(P) / Vol(MBB(P)); throws DegenerateBox for a flat bounding box.
double boxiness(const PartRef& part);

/// Vol(MBB(P)) - Vol(P).
double aboxiness(const PartRef& part);

enum class CostMetric {
  kAbsoluteAboxiness,  ///< A(C1 u C2), the default
  kRelativeBoxiness,   ///< 1 - B(C1 u C2), kept for ablation only
};

/// Cost of contracting the dual edge between two clusters, together with
/// the merged cluster it would produce.
struct ContractionCost {
  double cost = 0.0;
  PartRef merged;
};

ContractionCost contraction_cost(const PartRef& a, const PartRef& b,
                                 CostMetric metric, double epsilon);

struct SegmentationNode {
  NodeId id = kNoNode;
  PartRef part;
  std::optional<std::array<NodeId, 2>> children;
  NodeId parent = kNoNode;
  double aboxiness = 0.0;
  /// Contraction cost that created this node (0 for leaves).
  double cost = 0.0;
  /// True when the node joins two disconnected components.
  bool bridges_components = false;

  bool is_leaf() const { return !children.has_value(); }
};

/// Binary hierarchy of tetrahedra clusters. Leaves come first and node i is
/// the single tetrahedron i; internal nodes follow in contraction order.
class SegmentationTree {
 public:
  const SegmentationNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<SegmentationNode>& nodes() const { return nodes_; }
  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t num_leaves() const { return num_leaves_; }
  std::size_t depth(NodeId id) const;
  std::size_t height() const;

 private:
  friend class HierarchyBuilder;
  std::vector<SegmentationNode> nodes_;
  NodeId root_ = kNoNode;
  std::size_t num_leaves_ = 0;
};

/// Snapshot handed to the hierarchy observer right before a contraction.
struct ContractionEvent {
  double cost = 0.0;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  bool bridges_components = false;
  /// Live clusters before the contraction.
  std::vector<const SegmentationNode*> live;
};

struct HierarchyOptions {
  double epsilon = kSegmentationEpsilon;
  CostMetric metric = CostMetric::kAbsoluteAboxiness;
  std::function<void(const ContractionEvent&)> observer;
};

/// Bottom-up clustering of the tetrahedra: every dual edge is keyed by the
/// cost of its contraction, the cheapest edge is contracted, the costs of
/// the edges around the merged cluster are recomputed, and so on until one
/// cluster remains. Disconnected components are finally joined pairwise by
/// minimum cost.
SegmentationTree build_hierarchy(const TetMesh& mesh,
                                 const HierarchyOptions& options = {});

/// Replaces `node` in the active set by its two children (in place of the
/// node, first child first).
std::vector<NodeId> cut_tree(const SegmentationTree& tree,
                             std::span<const NodeId> active, NodeId node);

/// Active set obtained by splitting the root `parts - 1` times, always
/// splitting the active node with the largest aboxiness.
std::vector<NodeId> cut_at_count(const SegmentationTree& tree,
                                 std::size_t parts);

}  // namespace splitpack
