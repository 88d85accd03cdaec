#pragma once

#include "splitpack/errors.hpp"
#include "splitpack/packer.hpp"
#include "splitpack/segmentation.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace splitpack {

/// One part of the current decomposition: the tree node it stems from and
/// its elements, which plane refinement may have changed.
struct ActivePart {
  NodeId node = kNoNode;
  std::vector<TetIndex> tets;  // sorted
};

struct HistoryEntry {
  std::size_t n_parts = 0;
  double efficiency = 0.0;
  Vec3 box = Vec3::Zero();
  double elapsed_ms = 0.0;
};

struct SplitPackConfig;

struct AssemblyStep {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  NodeId group = kNoNode;  // tree node of the merged pair
};

struct AssemblyPlan {
  std::vector<AssemblyStep> steps;
};

struct SplitPackResult {
  /// Best packing over all iterations and the parts it packs.
  PackingResult packing;
  std::vector<ActivePart> parts;
  std::size_t best_iteration = 0;  // index into history
  std::vector<HistoryEntry> history;
  double initial_efficiency = 0.0;
  double vol_max = 0.0;
  bool target_reached = false;
  AssemblyPlan assembly;
  std::vector<std::string> warnings;
};

/// Asked when the part budget is exhausted before reaching the target; the
/// returned value is the new budget, or nullopt to stop.
using BudgetPrompt =
    std::function<std::optional<std::size_t>(const SplitPackResult& so_far)>;

struct SplitPackConfig {
  std::size_t n_max = 10;
  double target = 0.5;
  PackerConfig packer;
  bool interactive = false;
  BudgetPrompt prompt;
  /// Called after every iteration (including the unsplit start).
  std::function<void(const HistoryEntry&)> on_iteration;
};

/// The target could not be reached; carries the best result found.
class TargetUnreachable : public Error {
 public:
  TargetUnreachable(const std::string& what, SplitPackResult result)
      : Error(what),
        result_(std::make_shared<SplitPackResult>(std::move(result))) {}
  const SplitPackResult& result() const { return *result_; }

 private:
  std::shared_ptr<const SplitPackResult> result_;
};

/// Split-and-pack: starting from the whole object in its bounding box,
/// repeatedly split the part with the largest absolute aboxiness along the
/// hierarchy, flatten the new split surface and repack everything, until
/// the box volume drops to Vol(mesh) / target. Returns the most efficient
/// packing seen. Throws TargetUnreachable when the part budget (and any
/// prompted extension) or the splittable parts run out first.
SplitPackResult split_and_pack(const TetMesh& mesh, const SegmentationTree& tree,
                               const SplitPackConfig& config);

/// Active internal node with the largest aboxiness (ties: larger volume,
/// then smaller id). Throws NoSplittableNode if every node is a leaf.
NodeId select_split_node(const SegmentationTree& tree,
                         std::span<const NodeId> active);

/// True when the surface with these facet normals is a height field, i.e.
/// the origin is not inside the convex hull of the unit normals.
bool heightfield_check(std::span<const Vec3> normals);

/// Unit normals of triangles.
std::vector<Vec3> facet_normals(const TetMesh& mesh,
                                std::span<const Triangle> triangles);

struct RefineResult {
  std::vector<TetIndex> a, b;  // sorted
  Plane plane;                 // best fit of the final split surface
  std::size_t moved = 0;
  std::size_t rounds = 0;
};

/// Flattens the split between two adjacent parts: fits a plane to the shared
/// surface and moves the elements near it to the side of the plane their
/// centroid lies on, repeating until nothing moves. Throws DegenerateSplit
/// if a side would become empty.
RefineResult plane_refine(const TetMesh& mesh, const DualGraph& dual,
                          std::span<const TetIndex> a,
                          std::span<const TetIndex> b);

/// Merge steps reassembling the parts bottom-up along the tree, deepest
/// merges first (ties by node id).
AssemblyPlan assembly_plan(const SegmentationTree& tree,
                           std::span<const NodeId> active);

}  // namespace splitpack
