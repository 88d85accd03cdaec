#pragma once

#include "splitpack/packer.hpp"
#include "splitpack/pipeline.hpp"
#include "splitpack/segmentation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace splitpack::cli {

using nlohmann::json;

/// Run parameters shared by the subcommands; `to_json` echoes them so that a
/// report's config block reproduces the run when loaded back.
struct RunConfig {
  PackerConfig packer;
  std::size_t n_max = 10;
  double target = 0.5;
};

json config_json(const RunConfig& config);
/// Keys absent from `j` keep the values of `base`. Throws ConfigError.
RunConfig config_from_json(const json& j, RunConfig base = {});
void validate(const RunConfig& config);

json vec_json(const Vec3& v);
json quaternion_json(const UnitQuaternion& q);

/// Nodes with id, parent, children, tet count, volume, box and aboxiness.
json tree_json(const SegmentationTree& tree);

/// Per-part pose, box, efficiency, chosen variation and timing.
json packing_json(const PackingResult& result);

/// Poses only. With `part_tets`, every part also lists its elements of the
/// input mesh; otherwise part i is the i-th input file.
json placements_json(const PackingResult& result,
                     const std::vector<std::vector<TetIndex>>* part_tets);

json history_json(const HistoryEntry& entry);
json assembly_json(const AssemblyPlan& plan);

/// Hex SHA-256 over the contents of the files, in order.
std::string sha256_hex(std::span<const std::filesystem::path> files);

/// Parsed placements file.
struct PlacementSet {
  Vec3 box = Vec3::Zero();
  std::vector<RigidTransform> transforms;
  std::vector<std::vector<TetIndex>> part_tets;  // empty: one part per file
};

PlacementSet placements_from_json(const json& j);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace splitpack::cli
