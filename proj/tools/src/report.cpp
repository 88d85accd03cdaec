#include "splitpack/cli/report.hpp"

#include "splitpack/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

namespace splitpack::cli {

namespace {

const char* order_name(InsertionOrder order) {
  return order == InsertionOrder::kSorted ? "sorted" : "random";
}

const char* container_name(ContainerMode mode) {
  return mode == ContainerMode::kAssembled ? "assembled" : "independent";
}

const char* branch_name(PlacementBranch branch) {
  switch (branch) {
    case PlacementBranch::kFirst: return "first";
    case PlacementBranch::kHole: return "hole";
    case PlacementBranch::kTop: return "top";
  }
  return "top";
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vec3 vec_from(const json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  if (v.size() != 3) throw ParseError(std::string("'") + key + "' needs 3 numbers");
  return Vec3(v[0], v[1], v[2]);
}

}  // namespace

json config_json(const RunConfig& c) {
  const PackerConfig& p = c.packer;
  return {
      {"grid_budget", p.grid_budget},
      {"rotations", p.rotations},
      {"seed", p.seed},
      {"base_factors", p.base_factors},
      {"base_max_x", optional_json(p.base_max_x)},
      {"base_max_y", optional_json(p.base_max_y)},
      {"holes_enabled", p.holes_enabled},
      {"insertion_order", order_name(p.order)},
      {"container", container_name(p.container)},
      {"n_max", c.n_max},
      {"target", c.target},
  };
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PackerConfig& p = c.packer;
  if (j.contains("grid_budget")) p.grid_budget = get<int>(j, "grid_budget");
  if (j.contains("rotations")) p.rotations = get<int>(j, "rotations");
  if (j.contains("seed")) p.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("base_factors"))
    p.base_factors = get<std::vector<double>>(j, "base_factors");
  for (auto [key, field] : {std::pair{"base_max_x", &p.base_max_x},
                            std::pair{"base_max_y", &p.base_max_y}}) {
    if (!j.contains(key)) continue;
    if (j.at(key).is_null())
      field->reset();
    else
      *field = get<double>(j, key);
  }
  if (j.contains("holes_enabled")) p.holes_enabled = get<bool>(j, "holes_enabled");
  if (j.contains("insertion_order")) {
    const auto v = get<std::string>(j, "insertion_order");
    if (v == "sorted")
      p.order = InsertionOrder::kSorted;
    else if (v == "random")
      p.order = InsertionOrder::kRandom;
    else
      throw ConfigError("insertion_order must be 'sorted' or 'random'");
  }
  if (j.contains("container")) {
    const auto v = get<std::string>(j, "container");
    if (v == "assembled")
      p.container = ContainerMode::kAssembled;
    else if (v == "independent")
      p.container = ContainerMode::kIndependent;
    else
      throw ConfigError("container must be 'assembled' or 'independent'");
  }
  if (j.contains("n_max")) c.n_max = get<std::size_t>(j, "n_max");
  if (j.contains("target")) c.target = get<double>(j, "target");
  return c;
}

void validate(const RunConfig& c) {
  const PackerConfig& p = c.packer;
  if (p.grid_budget < 1) throw ConfigError("grid budget must be >= 1");
  if (p.rotations < 1) throw ConfigError("rotations must be >= 1");
  if (p.base_factors.empty()) throw ConfigError("base factors must not be empty");
  for (double f : p.base_factors)
    if (!(f > -1.0)) throw ConfigError("base factors must be > -1");
  for (const auto& m : {p.base_max_x, p.base_max_y})
    if (m && !(*m > 0)) throw ConfigError("base bounds must be positive");
  if (c.n_max < 1) throw ConfigError("nmax must be >= 1");
  if (!(c.target > 0 && c.target <= 1)) throw ConfigError("target must be in (0, 1]");
}

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

json quaternion_json(const UnitQuaternion& q) {
  return {q.w(), q.x(), q.y(), q.z()};
}

json tree_json(const SegmentationTree& tree) {
  json nodes = json::array();
  for (const SegmentationNode& n : tree.nodes()) {
    const OrientedBox& box = n.part.mbb();
    json children = json::array();
    if (n.children) children = {(*n.children)[0], (*n.children)[1]};
    nodes.push_back({
        {"id", n.id},
        {"parent", n.parent == kNoNode ? json(nullptr) : json(n.parent)},
        {"children", children},
        {"tet_count", n.part.tets().size()},
        {"volume", n.part.volume()},
        {"mbb",
         {{"center", vec_json(box.center)},
          {"axes", {vec_json(box.axes[0]), vec_json(box.axes[1]), vec_json(box.axes[2])}},
          {"half_extents", vec_json(box.half_extents)}}},
        {"aboxiness", n.aboxiness},
    });
  }
  return {{"root", tree.root() == kNoNode ? json(nullptr) : json(tree.root())},
          {"leaves", tree.num_leaves()},
          {"nodes", nodes}};
}

json packing_json(const PackingResult& r) {
  json parts = json::array();
  for (const PackedPart& p : r.placements)
    parts.push_back({{"part_id", p.part_id},
                     {"quaternion", quaternion_json(p.transform.rotation)},
                     {"translation", vec_json(p.transform.translation)},
                     {"rotation_index", p.rotation_index},
                     {"branch", branch_name(p.branch)}});
  json variations = json::array();
  for (const VariationOutcome& v : r.variations)
    variations.push_back({{"factor_x", v.factor_x},
                          {"factor_y", v.factor_y},
                          {"dims", v.dims},
                          {"skipped", v.skipped},
                          {"placed", v.placed},
                          {"efficiency", v.efficiency}});
  json chosen = nullptr;
  if (r.variation >= 0) {
    const VariationOutcome& v = r.variations[r.variation];
    chosen = {{"index", r.variation},
              {"factor_x", v.factor_x},
              {"factor_y", v.factor_y}};
  }
  return {{"parts", parts},
          {"insertion_order", r.insertion_order},
          {"box", vec_json(r.box_extents)},
          {"parts_volume", r.parts_volume},
          {"efficiency", r.efficiency},
          {"variation", chosen},
          {"variations", variations},
          {"grid", r.grid_dims},
          {"voxel_size", r.voxel_size},
          {"height_doublings", r.height_doublings},
          {"elapsed_ms", r.elapsed_ms}};
}

json placements_json(const PackingResult& r,
                     const std::vector<std::vector<TetIndex>>* part_tets) {
  json parts = json::array();
  for (const PackedPart& p : r.placements) {
    json part = {{"part_id", p.part_id},
                 {"quaternion", quaternion_json(p.transform.rotation)},
                 {"translation", vec_json(p.transform.translation)}};
    if (part_tets) part["tets"] = (*part_tets)[p.part_id];
    parts.push_back(std::move(part));
  }
  return {{"box", vec_json(r.box_extents)}, {"parts", parts}};
}

json history_json(const HistoryEntry& e) {
  return {{"n_parts", e.n_parts},
          {"efficiency", e.efficiency},
          {"box", vec_json(e.box)},
          {"elapsed_ms", e.elapsed_ms}};
}

json assembly_json(const AssemblyPlan& plan) {
  json steps = json::array();
  for (const AssemblyStep& s : plan.steps)
    steps.push_back({{"a", s.a}, {"b", s.b}, {"group", s.group}});
  return steps;
}

std::string sha256_hex(std::span<const std::filesystem::path> files) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("cannot initialise SHA-256");
  std::array<char, 1 << 16> buffer;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    while (in) {
      in.read(buffer.data(), buffer.size());
      EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int size = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &size);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < size; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

PlacementSet placements_from_json(const json& j) {
  PlacementSet set;
  try {
    set.box = vec_from(j, "box");
    const json& parts = j.at("parts");
    bool with_tets = false;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const json& p = parts[i];
      if (get<std::size_t>(p, "part_id") != i)
        throw ParseError("placements must be listed by part id");
      const auto q = get<std::vector<double>>(p, "quaternion");
      if (q.size() != 4) throw ParseError("'quaternion' needs 4 numbers");
      set.transforms.push_back(
          {UnitQuaternion(q[0], q[1], q[2], q[3]), vec_from(p, "translation")});
      if (i == 0) with_tets = p.contains("tets");
      if (with_tets != p.contains("tets"))
        throw ParseError("either every part lists its tets or none does");
      if (with_tets) set.part_tets.push_back(get<std::vector<TetIndex>>(p, "tets"));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed placements: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed placements: ") + e.what());
  }
  return set;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace splitpack::cli
