#include "splitpack/cli/app.hpp"

#include "splitpack/cli/report.hpp"
#include "splitpack/errors.hpp"
#include "splitpack/obj.hpp"
#include "splitpack/pipeline.hpp"
#include "splitpack/synthetic.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <numeric>
#include <sstream>

namespace splitpack::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Flag values as parsed; only flags actually given override the config.
struct PackerFlags {
  std::string config_path;
  int grid = 256;
  int rotations = 10;
  std::uint64_t seed = 0;
  std::vector<double> base_factors{0.0, 0.25, 0.5, -0.25};
  double base_max_x = 0, base_max_y = 0;
  std::string order = "sorted";
  std::string container = "independent";
  bool no_holes = false;
  unsigned threads = 0;

  CLI::Option *o_grid = nullptr, *o_rotations = nullptr, *o_seed = nullptr,
              *o_factors = nullptr, *o_max_x = nullptr, *o_max_y = nullptr,
              *o_order = nullptr, *o_container = nullptr, *o_no_holes = nullptr;
};

void add_packer_flags(CLI::App* cmd, PackerFlags& f, bool container) {
  cmd->add_option("--config", f.config_path, "JSON config (a report's config block)");
  f.o_grid = cmd->add_option("--grid", f.grid, "Voxels along the longest container axis (independent: the base side)");
  f.o_rotations = cmd->add_option("--rotations", f.rotations, "Sampled rotations per part");
  f.o_seed = cmd->add_option("--seed", f.seed, "Master random seed");
  f.o_factors = cmd->add_option("--base-factors", f.base_factors,
                                "Base growth factors, combined on X and Y")
                    ->delimiter(',');
  f.o_max_x = cmd->add_option("--base-max-x", f.base_max_x, "Upper bound on the base X size");
  f.o_max_y = cmd->add_option("--base-max-y", f.base_max_y, "Upper bound on the base Y size");
  f.o_order = cmd->add_option("--order", f.order, "Insertion order")
                  ->check(CLI::IsMember({"sorted", "random"}));
  if (container)
    f.o_container = cmd->add_option("--container", f.container,
                                    "Initial container: parts as assembled or independent")
                        ->check(CLI::IsMember({"assembled", "independent"}));
  f.o_no_holes = cmd->add_flag("--no-holes", f.no_holes, "Never place parts into holes");
  cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)");
}

RunConfig resolve(const PackerFlags& f, RunConfig c) {
  if (!f.config_path.empty()) c = config_from_json(read_json(f.config_path), c);
  PackerConfig& p = c.packer;
  auto given = [](const CLI::Option* o) { return o && o->count() > 0; };
  if (given(f.o_grid)) p.grid_budget = f.grid;
  if (given(f.o_rotations)) p.rotations = f.rotations;
  if (given(f.o_seed)) p.seed = f.seed;
  if (given(f.o_factors)) p.base_factors = f.base_factors;
  if (given(f.o_max_x)) p.base_max_x = f.base_max_x;
  if (given(f.o_max_y)) p.base_max_y = f.base_max_y;
  if (given(f.o_order))
    p.order = f.order == "random" ? InsertionOrder::kRandom : InsertionOrder::kSorted;
  if (given(f.o_container))
    p.container = f.container == "assembled" ? ContainerMode::kAssembled
                                             : ContainerMode::kIndependent;
  if (given(f.o_no_holes)) p.holes_enabled = !f.no_holes;
  p.threads = f.threads;
  return c;
}

/// The .node/.ele pair behind a mesh argument (either file or their stem).
std::vector<fs::path> mesh_files(const fs::path& arg) {
  fs::path base = arg;
  if (base.extension() == ".node" || base.extension() == ".ele") base.replace_extension();
  fs::path node = base, ele = base;
  node += ".node";
  ele += ".ele";
  for (const auto& p : {node, ele})
    if (!fs::exists(p)) throw IoError("cannot open " + p.string());
  return {node, ele};
}

struct Inputs {
  std::vector<TetMesh> meshes;
  std::vector<fs::path> files;
};

Inputs load_inputs(const std::vector<std::string>& args) {
  Inputs in;
  for (const auto& a : args) {
    const auto files = mesh_files(a);
    in.meshes.push_back(load_tetmesh(files[0], files[1]));
    in.files.insert(in.files.end(), files.begin(), files.end());
  }
  return in;
}

TetMesh single_mesh(Inputs& in) {
  return in.meshes.size() == 1 ? std::move(in.meshes.front())
                               : concatenate(in.meshes);
}

json input_json(const std::vector<std::string>& args, const Inputs& in) {
  return {{"files", args}, {"sha256", sha256_hex(in.files)}};
}

/// Writes packed.obj (parts in final pose plus the container) and one OBJ
/// per part.
void write_arrangement(const fs::path& dir, const Vec3& box,
                       const std::vector<ObjObject>& parts) {
  fs::create_directories(dir / "parts");
  std::vector<ObjObject> all = parts;
  all.push_back(box_wireframe(box));
  write_obj(dir / "packed.obj", all);
  for (const ObjObject& p : parts)
    write_obj(dir / "parts" / (p.name + ".obj"), std::span(&p, 1));
}

std::string part_name(std::size_t i) {
  std::ostringstream s;
  s << "part_" << std::setw(3) << std::setfill('0') << i;
  return s.str();
}

std::vector<ObjObject> mesh_parts(const TetMesh& mesh,
                                  const std::vector<std::vector<TetIndex>>& tets,
                                  const std::vector<RigidTransform>& poses) {
  std::vector<ObjObject> out;
  for (std::size_t i = 0; i < tets.size(); ++i)
    out.push_back(part_object(mesh, tets[i], poses[i], part_name(i)));
  return out;
}

std::vector<ObjObject> file_parts(const std::vector<TetMesh>& meshes,
                                  const std::vector<RigidTransform>& poses) {
  std::vector<ObjObject> out;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    std::vector<TetIndex> all(meshes[i].num_tets());
    std::iota(all.begin(), all.end(), TetIndex{0});
    out.push_back(part_object(meshes[i], all, poses[i], part_name(i)));
  }
  return out;
}

std::vector<RigidTransform> poses(const PackingResult& r) {
  std::vector<RigidTransform> out;
  for (const PackedPart& p : r.placements) out.push_back(p.transform);
  return out;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

bool is_input_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const IoError*>(&e) ||
         dynamic_cast<const ParseError*>(&e) || dynamic_cast<const MeshError*>(&e) ||
         dynamic_cast<const DegenerateTet*>(&e) ||
         dynamic_cast<const DegenerateInput*>(&e);
}

// --- subcommands ----------------------------------------------------------

struct SegmentArgs {
  std::vector<std::string> meshes;
  std::string output;
  std::string out_dir = ".";
  std::size_t dump_level = 0;
};

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
  Inputs in = load_inputs(a.meshes);
  const TetMesh mesh = single_mesh(in);
  const auto start = Clock::now();
  const SegmentationTree tree = build_hierarchy(mesh);
  const double elapsed = ms_since(start);

  const fs::path output = a.output.empty() ? fs::path(a.out_dir) / "tree.json"
                                           : fs::path(a.output);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  json j = tree_json(tree);
  j["input"] = input_json(a.meshes, in);
  write_json(output, j);

  if (a.dump_level > 0) {
    const auto cut = cut_at_count(tree, a.dump_level);
    const fs::path dir = fs::path(a.out_dir) / ("level_" + std::to_string(a.dump_level));
    fs::create_directories(dir);
    for (std::size_t i = 0; i < cut.size(); ++i) {
      const ObjObject part = part_object(mesh, tree.node(cut[i]).part.tets(),
                                         RigidTransform::identity(), part_name(i));
      write_obj(dir / (part.name + ".obj"), std::span(&part, 1));
    }
  }
  out << "tets " << mesh.num_tets() << ", depth " << tree.height()
      << ", hierarchy " << fixed(elapsed, 1) << " ms -> " << output.string() << '\n';
  return kOk;
}

struct SplitPackArgs {
  std::vector<std::string> meshes;
  std::string out_dir = ".";
  std::size_t n_max = 10;
  double target = 0.5;
  bool non_interactive = false;
  CLI::Option *o_nmax = nullptr, *o_target = nullptr;
  PackerFlags packer;
};

int cmd_splitpack(const SplitPackArgs& a, std::istream& in_stream, std::ostream& out,
                  std::ostream& err, bool tty) {
  RunConfig defaults;
  defaults.packer.container = ContainerMode::kAssembled;
  RunConfig config = resolve(a.packer, defaults);
  if (a.o_nmax->count()) config.n_max = a.n_max;
  if (a.o_target->count()) config.target = a.target;
  config.packer.container = ContainerMode::kAssembled;
  validate(config);

  const auto start = Clock::now();
  Inputs in = load_inputs(a.meshes);
  const TetMesh mesh = single_mesh(in);
  const auto seg_start = Clock::now();
  const SegmentationTree tree = build_hierarchy(mesh);
  const double hierarchy_ms = ms_since(seg_start);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  std::ofstream history(dir / "history.jsonl");
  if (!history) throw IoError("cannot write " + (dir / "history.jsonl").string());

  SplitPackConfig sp;
  sp.n_max = config.n_max;
  sp.target = config.target;
  sp.packer = config.packer;
  sp.interactive = tty && !a.non_interactive;
  sp.prompt = [&](const SplitPackResult& so_far) -> std::optional<std::size_t> {
    err << "Reached " << so_far.history.back().n_parts << " parts at efficiency "
        << fixed(so_far.packing.efficiency) << " (target " << fixed(config.target)
        << "). New part budget (empty to stop): " << std::flush;
    std::string line;
    if (!std::getline(in_stream, line)) return std::nullopt;
    try {
      return static_cast<std::size_t>(std::stoul(line));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  sp.on_iteration = [&](const HistoryEntry& e) {
    history << history_json(e).dump() << '\n' << std::flush;
    out << "parts " << e.n_parts << "  efficiency " << fixed(e.efficiency) << '\n';
  };

  SplitPackResult result;
  int code = kOk;
  const auto pack_start = Clock::now();
  try {
    result = split_and_pack(mesh, tree, sp);
  } catch (const TargetUnreachable& e) {
    result = e.result();
    err << "target not reached: " << e.what() << '\n';
    code = kTargetUnreachable;
  }
  const double packing_ms = ms_since(pack_start);

  std::vector<std::vector<TetIndex>> part_tets;
  for (const ActivePart& p : result.parts) part_tets.push_back(p.tets);
  write_arrangement(dir, result.packing.box_extents,
                    mesh_parts(mesh, part_tets, poses(result.packing)));
  write_json(dir / "placements.json", placements_json(result.packing, &part_tets));

  json hist = json::array();
  for (const HistoryEntry& e : result.history) hist.push_back(history_json(e));
  json report = {
      {"input", input_json(a.meshes, in)},
      {"config", config_json(config)},
      {"n_parts", result.parts.size()},
      {"target_reached", result.target_reached},
      {"vol_max", result.vol_max},
      {"initial_efficiency", result.initial_efficiency},
      {"best_iteration", result.best_iteration},
      {"packing", packing_json(result.packing)},
      {"history", hist},
      {"assembly", assembly_json(result.assembly)},
      {"warnings", result.warnings},
      {"timings", {{"hierarchy_ms", hierarchy_ms},
                   {"packing_ms", packing_ms},
                   {"total_ms", ms_since(start)}}},
  };
  write_json(dir / "report.json", report);
  out << "best: " << result.parts.size() << " parts, efficiency "
      << fixed(result.packing.efficiency) << " (initial "
      << fixed(result.initial_efficiency) << ")"
      << (result.target_reached ? "" : ", target not reached") << '\n';
  return code;
}

struct PackArgs {
  std::vector<std::string> parts;
  std::string out_dir = ".";
  PackerFlags packer;
};

RunConfig independent_defaults() {
  RunConfig c;
  c.packer.container = ContainerMode::kIndependent;
  return c;
}

int cmd_pack(const PackArgs& a, std::ostream& out) {
  const RunConfig config = resolve(a.packer, independent_defaults());
  validate(config);
  const auto start = Clock::now();
  Inputs in = load_inputs(a.parts);
  std::vector<PackPart> parts;
  for (const TetMesh& m : in.meshes) parts.push_back(PackPart::from_mesh(m));
  const PackingResult result = pack(parts, config.packer);

  const fs::path dir(a.out_dir);
  write_arrangement(dir, result.box_extents, file_parts(in.meshes, poses(result)));
  write_json(dir / "placements.json", placements_json(result, nullptr));
  json report = {
      {"input", input_json(a.parts, in)},
      {"config", config_json(config)},
      {"n_parts", parts.size()},
      {"packing", packing_json(result)},
      {"timings", {{"packing_ms", result.elapsed_ms}, {"total_ms", ms_since(start)}}},
  };
  write_json(dir / "report.json", report);
  out << "packed " << parts.size() << " parts, efficiency " << fixed(result.efficiency)
      << ", box " << fixed(result.box_extents.x()) << " x "
      << fixed(result.box_extents.y()) << " x " << fixed(result.box_extents.z()) << '\n';
  return kOk;
}

struct BenchArgs {
  std::size_t count = 50;
  std::size_t runs = 5;
  double min_edge = 0.1, max_edge = 0.3;
  std::string output;
  std::string out_dir = ".";
  PackerFlags packer;
};

int cmd_bench_boxes(const BenchArgs& a, std::ostream& out) {
  RunConfig config = resolve(a.packer, independent_defaults());
  config.packer.container = ContainerMode::kIndependent;
  validate(config);
  if (a.count < 1 || a.runs < 1) throw ConfigError("count and runs must be >= 1");
  if (!(a.min_edge > 0 && a.min_edge <= a.max_edge))
    throw ConfigError("edge range must satisfy 0 < min <= max");

  json runs = json::array();
  std::vector<double> eff;
  for (std::size_t r = 0; r < a.runs; ++r) {
    PackerConfig pc = config.packer;
    pc.seed = config.packer.seed + r;
    std::vector<PackPart> parts;
    for (const TetMesh& m : random_boxes(a.count, a.min_edge, a.max_edge, pc.seed))
      parts.push_back(PackPart::from_mesh(m));
    const PackingResult result = pack(parts, pc);
    eff.push_back(result.efficiency);
    runs.push_back({{"seed", pc.seed},
                    {"efficiency", result.efficiency},
                    {"box", vec_json(result.box_extents)},
                    {"variation", result.variation},
                    {"elapsed_ms", result.elapsed_ms}});
    out << "run " << r << " seed " << pc.seed << "  efficiency "
        << fixed(result.efficiency) << "  " << fixed(result.elapsed_ms / 1000, 1) << " s\n";
  }
  const double n = static_cast<double>(eff.size());
  const double mean = std::accumulate(eff.begin(), eff.end(), 0.0) / n;
  double var = 0;
  for (double e : eff) var += (e - mean) * (e - mean);
  const double stddev = eff.size() > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  out << "mean efficiency " << fixed(mean) << " (sd " << fixed(stddev) << ")\n";

  json stats = {
      {"config", config_json(config)},
      {"boxes", {{"count", a.count}, {"min_edge", a.min_edge}, {"max_edge", a.max_edge}}},
      {"runs", runs},
      {"mean_efficiency", mean},
      {"stddev", stddev},
      {"min_efficiency", *std::min_element(eff.begin(), eff.end())},
      {"max_efficiency", *std::max_element(eff.begin(), eff.end())},
  };
  const fs::path output = a.output.empty() ? fs::path(a.out_dir) / "bench.json"
                                           : fs::path(a.output);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_json(output, stats);
  return kOk;
}

struct ExportArgs {
  std::vector<std::string> meshes;
  std::string placements;
  std::string out_dir = ".";
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const PlacementSet set = placements_from_json(read_json(a.placements));
  Inputs in = load_inputs(a.meshes);
  std::vector<ObjObject> parts;
  if (set.part_tets.empty()) {
    if (in.meshes.size() != set.transforms.size())
      throw ConfigError("placements list " + std::to_string(set.transforms.size()) +
                        " parts but " + std::to_string(in.meshes.size()) +
                        " meshes were given");
    parts = file_parts(in.meshes, set.transforms);
  } else {
    const TetMesh mesh = single_mesh(in);
    for (const auto& tets : set.part_tets)
      for (TetIndex t : tets)
        if (t >= mesh.num_tets()) throw ConfigError("placements do not match the mesh");
    parts = mesh_parts(mesh, set.part_tets, set.transforms);
  }
  write_arrangement(a.out_dir, set.box, parts);
  out << "exported " << parts.size() << " parts to " << a.out_dir << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err, bool interactive_tty) {
  CLI::App app{"Split solid tetrahedral meshes into box-like parts and pack them"};
  app.name("splitpack");
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "Build the part hierarchy of a mesh");
  segment->add_option("meshes", seg.meshes, "TetGen meshes (.node/.ele or stem)")->required();
  segment->add_option("-o,--output", seg.output, "Tree JSON (default: <out-dir>/tree.json)");
  segment->add_option("--out-dir", seg.out_dir, "Output directory");
  segment->add_option("--dump-level", seg.dump_level, "Write one OBJ per part at this part count");

  SplitPackArgs sp;
  auto* splitpack = app.add_subcommand("splitpack", "Split a mesh and pack its parts");
  splitpack->add_option("meshes", sp.meshes, "TetGen meshes (.node/.ele or stem)")->required();
  sp.o_nmax = splitpack->add_option("--nmax", sp.n_max, "Part budget");
  sp.o_target = splitpack->add_option("--target", sp.target, "Target packing efficiency");
  splitpack->add_flag("--non-interactive", sp.non_interactive,
                      "Never prompt for a larger part budget");
  splitpack->add_option("--out-dir", sp.out_dir, "Output directory");
  add_packer_flags(splitpack, sp.packer, false);

  PackArgs pk;
  auto* packcmd = app.add_subcommand("pack", "Pack the given parts without splitting");
  packcmd->add_option("parts", pk.parts, "One TetGen mesh per part")->required();
  packcmd->add_option("--out-dir", pk.out_dir, "Output directory");
  add_packer_flags(packcmd, pk.packer, true);

  BenchArgs bb;
  auto* bench = app.add_subcommand("bench-boxes", "Pack random boxes and report efficiency");
  bench->add_option("--count", bb.count, "Boxes per run");
  bench->add_option("--runs", bb.runs, "Runs, seeded seed, seed + 1, ...");
  bench->add_option("--min-edge", bb.min_edge, "Smallest box edge");
  bench->add_option("--max-edge", bb.max_edge, "Largest box edge");
  bench->add_option("-o,--output", bb.output, "Stats JSON (default: <out-dir>/bench.json)");
  bench->add_option("--out-dir", bb.out_dir, "Output directory");
  add_packer_flags(bench, bb.packer, false);

  ExportArgs ex;
  auto* exportcmd = app.add_subcommand("export", "Write OBJs of a saved arrangement");
  exportcmd->add_option("meshes", ex.meshes, "The meshes the placements refer to")->required();
  exportcmd->add_option("--placements", ex.placements, "placements.json")->required();
  exportcmd->add_option("--out-dir", ex.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (segment->parsed()) return cmd_segment(seg, out);
    if (splitpack->parsed()) return cmd_splitpack(sp, in, out, err, interactive_tty);
    if (packcmd->parsed()) return cmd_pack(pk, out);
    if (bench->parsed()) return cmd_bench_boxes(bb, out);
    if (exportcmd->parsed()) return cmd_export(ex, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e) ? kUsage : kFailure;
  }
  return kUsage;
}

}  // namespace splitpack::cli
