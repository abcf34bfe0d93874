#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "millaccess/accessibility.hpp"
#include "millaccess/colored_export.hpp"
#include "millaccess/cutter.hpp"
#include "millaccess/dataset.hpp"
#include "millaccess/mesh_io.hpp"
#include "millaccess/metrics.hpp"
#include "millaccess/sampling.hpp"

namespace millaccess::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // parse or validation failure
inline constexpr int kExitAnalysis = 2;  // failure inside the engine

/// Raised for input problems that map to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct ShapeFlags {
  std::string mesh;
  std::size_t sites = 7000;
  std::size_t dirs = 150;
  std::string dir_mode = "fibonacci";
  std::size_t azimuths = 0;
  std::string cutter;
  std::string preset;
  std::uint64_t seed = 0;
  double sigma = kDefaultSigma;
  double occlusion_frac = 0.10;
  std::string shaft = "fr_plus_sigma";
  std::size_t lloyd = 10;
  double min_edge = 80.0;
  bool brute = false;
  bool no_prefilter = false;
  bool force = false;
  bool normalize = false;
  std::string out;
  std::string color;
  unsigned threads = 1;
};

inline void add_shape_flags(CLI::App& cmd, ShapeFlags& f, bool with_force) {
  cmd.add_option("mesh", f.mesh, "Input mesh (.obj, .stl, .ply)")->required();
  cmd.add_option("--sites", f.sites, "Number of surface sites")->capture_default_str();
  cmd.add_option("--dirs", f.dirs, "Number of cutter directions")->capture_default_str();
  cmd.add_option("--dir-mode", f.dir_mode, "Direction sampling: fibonacci or latlong")
      ->check(CLI::IsMember({"fibonacci", "latlong"}))
      ->capture_default_str();
  cmd.add_option("--azimuths", f.azimuths, "Azimuths per ring (latlong; dirs = rings*azimuths+1)");
  cmd.add_option("--cutter", f.cutter, "Cutter as CR,CH,FR,FH in mm");
  cmd.add_option("--preset", f.preset, "Random cutter preset: uniform, short, long, extreme")
      ->check(CLI::IsMember({"uniform", "short", "long", "extreme"}));
  cmd.add_option("--seed", f.seed, "Seed for sampling and random cutters")->capture_default_str();
  cmd.add_option("--sigma", f.sigma, "Detection cylinder margin beyond FR (mm)")->capture_default_str();
  cmd.add_option("--occlusion-frac", f.occlusion_frac, "Fraction of sites labelled as occluders")
      ->capture_default_str();
  cmd.add_option("--shaft", f.shaft, "Shaft model: fr_plus_sigma or infinite")
      ->check(CLI::IsMember({"fr_plus_sigma", "infinite"}))
      ->capture_default_str();
  cmd.add_option("--lloyd", f.lloyd, "Lloyd relaxation iterations")->capture_default_str();
  cmd.add_option("--min-edge", f.min_edge, "Scale up until the shortest bbox edge reaches this (mm); 0 disables")
      ->capture_default_str();
  cmd.add_flag("--brute", f.brute, "Use the exhaustive reference engine");
  cmd.add_flag("--no-prefilter", f.no_prefilter, "Disable the detection-cylinder prefilter");
  if (with_force) cmd.add_flag("--force", f.force, "Analyze even if mesh validation fails");
  cmd.add_flag("--normalize", f.normalize, "Write record coordinates normalized to [-1,1]^3");
  cmd.add_option("--out", f.out, "Output record (.dma)");
  cmd.add_option("--color", f.color, "Output label-coloured mesh (.ply)");
  cmd.add_option("--threads", f.threads, "Worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();
}

inline Cutter resolve_cutter(const ShapeFlags& f) {
  if (f.cutter.empty() == f.preset.empty())
    throw UsageError("exactly one of --cutter CR,CH,FR,FH or --preset NAME is required");
  try {
    if (!f.cutter.empty()) return parse_cutter(f.cutter, f.sigma);
    return random_cutter(CutterPreset::from_name(f.preset), f.seed, f.sigma);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

inline AccessibilityOptions resolve_options(const ShapeFlags& f) {
  AccessibilityOptions o;
  o.sigma = f.sigma;
  o.occlusion_fraction = f.occlusion_frac;
  o.prefilter = !f.no_prefilter;
  o.shaft_mode = shaft_mode_from_name(f.shaft);
  o.threads = f.threads;
  try {
    o.check();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return o;
}

struct PreparedShape {
  TriangleMesh mesh;
  ValidationReport validation;
  double scale = 1.0;
};

inline PreparedShape prepare_mesh(const ShapeFlags& f, std::ostream& err, bool require_valid) {
  PreparedShape s;
  try {
    s.mesh = load_mesh(f.mesh);
  } catch (const Error& e) {
    throw UsageError(std::string("cannot load mesh: ") + e.what());
  }
  s.validation = validate(s.mesh);
  const std::string reason = rejection_reason(s.validation);
  if (!reason.empty()) {
    if (require_valid) throw UsageError("mesh rejected: " + reason);
    err << "warning: mesh " << reason << " (continuing because of --force)\n";
  }
  if (f.min_edge > 0) {
    try {
      const ScaleResult r = rescale_to_min_edge(s.mesh, f.min_edge);
      s.mesh = r.mesh;
      s.scale = r.scale;
    } catch (const DegenerateBBox& e) {
      throw UsageError(std::string(e.what()) + " (use --min-edge 0 for flat meshes)");
    }
  }
  return s;
}

inline DirectionSet resolve_directions(const ShapeFlags& f) {
  try {
    return sample_directions(f.dirs, direction_mode_from_name(f.dir_mode), f.azimuths);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

inline void print_density(const DensityReport& d, const Cutter& c, std::ostream& err) {
  if (!d.ok)
    err << "warning: max site gap " << d.max_neighbor_gap << " mm is not below CR = " << c.ball_radius
        << " mm; thin features may be missed\n";
}

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline int cmd_analyze(const ShapeFlags& f, std::ostream& out, std::ostream& err) {
  const Cutter cutter = resolve_cutter(f);
  const AccessibilityOptions options = resolve_options(f);
  const DirectionSet dirs = resolve_directions(f);
  if (f.sites == 0) throw UsageError("--sites must be at least 1");
  const PreparedShape shape = prepare_mesh(f, err, !f.force);

  const auto t0 = std::chrono::steady_clock::now();
  const SurfaceSamples samples = sample_surface(shape.mesh, f.sites, f.lloyd, f.seed, f.threads);
  print_density(check_sampling_density(samples, cutter), cutter, err);
  const AccessibilityReport report = f.brute ? brute_force_analyze(samples, dirs, cutter, options)
                                             : analyze(samples, dirs, cutter, options);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!f.out.empty()) {
    DatasetRecord rec;
    rec.shape_id = std::filesystem::path(f.mesh).stem().string();
    rec.cutter = cutter;
    rec.direction_count = dirs.size();
    rec.points = samples.sites;
    rec.normals = samples.normals;
    rec.label_i = report.inaccessible;
    rec.label_o = report.occlusion;
    if (f.normalize) normalize_record(rec);
    write_record(rec, f.out);
  }
  if (!f.color.empty()) export_colored_mesh(shape.mesh, samples, report, f.color);

  out << "n: " << samples.size() << "\n";
  out << "m: " << dirs.size() << "\n";
  out << "inaccessible: " << report.inaccessible_count() << "\n";
  out << "occlusion: " << report.occlusion_count() << "\n";
  out << "label_time_s: " << report.meta.label_seconds << "\n";
  out << "occlusion_time_s: " << report.meta.occlusion_seconds << "\n";
  out << "wall_time_s: " << wall << "\n";
  return kExitOk;
}

inline int cmd_volume(const ShapeFlags& f, int resolution, std::ostream& out, std::ostream& err) {
  const Cutter cutter = resolve_cutter(f);
  const AccessibilityOptions options = resolve_options(f);
  const DirectionSet dirs = resolve_directions(f);
  if (resolution < 2) throw UsageError("--resolution must be at least 2");
  PreparedShape shape;
  try {
    shape.mesh = load_mesh(f.mesh);
  } catch (const Error& e) {
    throw UsageError(std::string("cannot load mesh: ") + e.what());
  }
  if (!validate(shape.mesh).is_watertight) throw UsageError("mesh rejected: not watertight");
  if (f.min_edge > 0) shape.mesh = normalize_scale(shape.mesh, f.min_edge);

  const auto t0 = std::chrono::steady_clock::now();
  const VolumeSamples volume = sample_volume(shape.mesh, resolution);
  DatasetRecord rec;
  rec.shape_id = std::filesystem::path(f.mesh).stem().string();
  rec.cutter = cutter;
  rec.direction_count = dirs.size();
  std::size_t inaccessible = 0;
  if (!volume.empty()) {
    const SurfaceSamples obstacles = sample_surface(shape.mesh, f.sites, f.lloyd, f.seed, f.threads);
    print_density(check_sampling_density(obstacles, cutter), cutter, err);
    const AccessibilityReport report = f.brute ? brute_force_analyze_volume(volume, obstacles, dirs, cutter, options)
                                               : analyze_volume(volume, obstacles, dirs, cutter, options);
    inaccessible = report.inaccessible_count();
    rec.points = volume.points;
    rec.normals.assign(volume.size(), Vec3{});
    rec.label_i = report.inaccessible;
    rec.label_o.assign(volume.size(), 0);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!f.out.empty()) {
    if (f.normalize) normalize_record(rec);
    write_record(rec, f.out);
  }
  out << volume.size() << " volume points\n";
  out << "grid: " << volume.grid_resolution[0] << "x" << volume.grid_resolution[1] << "x"
      << volume.grid_resolution[2] << "\n";
  out << "m: " << dirs.size() << "\n";
  out << "inaccessible: " << inaccessible << "\n";
  out << "wall_time_s: " << wall << "\n";
  return kExitOk;
}

struct SampleFlags {
  std::string mesh;
  std::size_t sites = 7000;
  std::size_t lloyd = 10;
  std::uint64_t seed = 0;
  double min_edge = 80.0;
  std::string cutter;
  std::string out;
  unsigned threads = 1;
};

inline int cmd_sample(const SampleFlags& f, std::ostream& out, std::ostream& err) {
  ShapeFlags shape_flags;
  shape_flags.mesh = f.mesh;
  shape_flags.min_edge = f.min_edge;
  if (f.sites == 0) throw UsageError("--sites must be at least 1");
  const PreparedShape shape = prepare_mesh(shape_flags, err, false);
  const SurfaceSamples samples = sample_surface(shape.mesh, f.sites, f.lloyd, f.seed, f.threads);
  if (!f.out.empty()) write_sites(samples, f.out);
  out << "sites: " << samples.size() << "\n";
  Cutter probe = Cutter::with_margin(1.0, 0.0, 1.0, 0.0);
  if (!f.cutter.empty()) {
    try {
      probe = parse_cutter(f.cutter);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  const DensityReport d = check_sampling_density(samples, probe);
  out << "max_neighbor_gap: " << d.max_neighbor_gap << "\n";
  if (!f.cutter.empty()) out << "density_ok: " << (d.ok ? "yes" : "no") << "\n";
  return kExitOk;
}

inline int cmd_evaluate(const std::vector<std::string>& files, bool per_shape, std::ostream& out) {
  if (files.size() < 2 || files.size() % 2 != 0)
    throw UsageError("evaluate expects pairs of <ground-truth.dma> <predictions.txt>");
  std::vector<ShapeScores> scores;
  for (std::size_t k = 0; k < files.size(); k += 2) {
    DatasetRecord gt;
    Predictions pred;
    try {
      gt = read_record(files[k]);
      pred = read_predictions(files[k + 1]);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (gt.size() == 0) throw UsageError(files[k] + ": record has no rows");
    try {
      scores.push_back(score_shape(gt.label_i, pred.label_i, gt.label_o, pred.label_o));
    } catch (const LengthMismatch& e) {
      throw UsageError(files[k] + " vs " + files[k + 1] + ": " + e.what());
    }
    if (per_shape || files.size() == 2) {
      const ShapeScores& s = scores.back();
      if (files.size() > 2) out << "shape " << gt.shape_id << "\n";
      out << "Acc_i: " << fixed4(s.acc_i) << "\n";
      out << "F1_i: " << fixed4(s.f1_i) << "\n";
      out << "Acc_o: " << fixed4(s.acc_o) << "\n";
      out << "F1_o: " << fixed4(s.f1_o) << "\n";
    }
  }
  if (files.size() > 2) {
    const ShapeScores m = mean_scores(scores);
    out << "mean over " << scores.size() << " shapes (unweighted)\n";
    out << "Acc_i: " << fixed4(m.acc_i) << "\n";
    out << "F1_i: " << fixed4(m.f1_i) << "\n";
    out << "Acc_o: " << fixed4(m.acc_o) << "\n";
    out << "F1_o: " << fixed4(m.f1_o) << "\n";
  }
  return kExitOk;
}

inline int cmd_colorize(const std::string& mesh_path, const std::string& record_path, const std::string& out_path,
                        double min_edge, std::ostream& out) {
  TriangleMesh mesh;
  DatasetRecord rec;
  try {
    mesh = load_mesh(mesh_path);
    rec = read_record(record_path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (rec.normalized) throw UsageError("record coordinates are normalized; colorize needs a record in mm");
  if (rec.size() == 0) throw UsageError("record has no rows");
  if (min_edge > 0) mesh = normalize_scale(mesh, min_edge);
  write_ply(mesh, out_path, label_face_colors(mesh, rec.points, {}, rec.label_i, rec.label_o));
  out << "triangles: " << mesh.triangle_count() << "\n";
  return kExitOk;
}

inline int cmd_dataset_run(const std::string& config_path, PipelineConfig overrides, const CLI::App& run,
                           unsigned threads, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto given = [&](const char* name) { return run.count(name) > 0; };
  if (given("--input")) cfg.input_dir = overrides.input_dir;
  if (given("--output")) cfg.output_dir = overrides.output_dir;
  if (given("--sites")) cfg.n_sites = overrides.n_sites;
  if (given("--dirs")) cfg.m_directions = overrides.m_directions;
  if (given("--lloyd")) cfg.lloyd_iters = overrides.lloyd_iters;
  if (given("--preset")) cfg.preset = overrides.preset;
  if (given("--seed")) cfg.seed = overrides.seed;
  if (given("--no-normalize")) cfg.normalize = false;
  if (given("--min-edge")) cfg.min_bbox_edge = overrides.min_bbox_edge;
  if (cfg.input_dir.empty() || cfg.output_dir.empty())
    throw UsageError("dataset run needs an input and output directory (--config or --input/--output)");
  PipelineSummary s;
  try {
    s = run_pipeline(cfg, threads, &err);
  } catch (const EmptyInputDir& e) {
    throw UsageError(e.what());
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  } catch (const InvalidCount& e) {
    throw UsageError(e.what());
  }
  out << "shapes_ok: " << s.shapes_ok << "\n";
  out << "shapes_skipped: " << s.shapes_skipped << "\n";
  out << "manifest: " << s.manifest_path.string() << "\n";
  return kExitOk;
}

/// Entry point shared by main() and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Cutter accessibility and occlusion analysis for triangle meshes"};
  app.require_subcommand(1);

  ShapeFlags analyze_flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "Label inaccessible and occlusion sites on a surface");
  add_shape_flags(*analyze_cmd, analyze_flags, true);

  ShapeFlags volume_flags;
  int resolution = 32;
  auto* volume_cmd = app.add_subcommand("volume", "Label inaccessible stock points inside the bounding box");
  add_shape_flags(*volume_cmd, volume_flags, false);
  volume_cmd->add_option("--resolution", resolution, "Grid cells along the longest bbox edge")->capture_default_str();

  SampleFlags sample_flags;
  auto* sample_cmd = app.add_subcommand("sample", "Lloyd-relaxed surface sampling");
  sample_cmd->add_option("mesh", sample_flags.mesh, "Input mesh")->required();
  sample_cmd->add_option("--sites", sample_flags.sites, "Number of sites")->capture_default_str();
  sample_cmd->add_option("--lloyd", sample_flags.lloyd, "Lloyd iterations")->capture_default_str();
  sample_cmd->add_option("--seed", sample_flags.seed, "Sampling seed")->capture_default_str();
  sample_cmd->add_option("--min-edge", sample_flags.min_edge, "Minimum bbox edge (mm); 0 disables")
      ->capture_default_str();
  sample_cmd->add_option("--cutter", sample_flags.cutter, "Cutter CR,CH,FR,FH for the density check");
  sample_cmd->add_option("--out", sample_flags.out, "Write sites as 'x y z nx ny nz' lines");
  sample_cmd->add_option("--threads", sample_flags.threads, "Worker threads")->capture_default_str();

  auto* dataset_cmd = app.add_subcommand("dataset", "Batch dataset generation");
  dataset_cmd->require_subcommand(1);
  auto* run_cmd = dataset_cmd->add_subcommand("run", "Process every mesh in a directory");
  std::string config_path;
  PipelineConfig overrides;
  std::string input_dir, output_dir;
  unsigned dataset_threads = 1;
  bool no_normalize = false;
  run_cmd->add_option("--config", config_path, "JSON config with PipelineConfig field names");
  run_cmd->add_option("--input", input_dir, "Directory of meshes");
  run_cmd->add_option("--output", output_dir, "Output directory");
  run_cmd->add_option("--sites", overrides.n_sites, "Sites per shape");
  run_cmd->add_option("--dirs", overrides.m_directions, "Cutter directions");
  run_cmd->add_option("--lloyd", overrides.lloyd_iters, "Lloyd iterations");
  run_cmd->add_option("--preset", overrides.preset, "Cutter preset")
      ->check(CLI::IsMember({"uniform", "short", "long", "extreme"}));
  run_cmd->add_option("--seed", overrides.seed, "Run seed");
  run_cmd->add_flag("--no-normalize", no_normalize, "Keep record coordinates in mm");
  run_cmd->add_option("--min-edge", overrides.min_bbox_edge, "Minimum bbox edge (mm)");
  run_cmd->add_option("--threads", dataset_threads, "Worker threads; output does not depend on it");

  std::vector<std::string> eval_files;
  bool per_shape = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground-truth records");
  eval_cmd->add_option("files", eval_files, "<gt.dma> <pred.txt> [<gt.dma> <pred.txt> ...]")->required();
  eval_cmd->add_flag("--per-shape", per_shape, "Print scores for every shape, not just the mean");

  std::string color_mesh, color_record, color_out;
  double color_min_edge = 80.0;
  auto* color_cmd = app.add_subcommand("colorize", "Colour a mesh by the labels in a record");
  color_cmd->add_option("mesh", color_mesh, "Input mesh")->required();
  color_cmd->add_option("record", color_record, "Record (.dma) in mm")->required();
  color_cmd->add_option("--out", color_out, "Output PLY")->required();
  color_cmd->add_option("--min-edge", color_min_edge, "Same rescale as used for the record")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) {
      target = sub;
      for (CLI::App* subsub : sub->get_subcommands()) target = subsub;
    }
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "usage: run with --help for the available subcommands and flags\n";
    return kExitUsage;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_flags, out, err);
    if (*volume_cmd) return cmd_volume(volume_flags, resolution, out, err);
    if (*sample_cmd) return cmd_sample(sample_flags, out, err);
    if (*eval_cmd) return cmd_evaluate(eval_files, per_shape, out);
    if (*color_cmd) return cmd_colorize(color_mesh, color_record, color_out, color_min_edge, out);
    if (*run_cmd) {
      overrides.input_dir = input_dir;
      overrides.output_dir = output_dir;
      overrides.normalize = !no_normalize;
      return cmd_dataset_run(config_path, overrides, *run_cmd, dataset_threads, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    for (CLI::App* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "analysis error: " << e.what() << "\n";
    return kExitAnalysis;
  }
  return kExitUsage;
}

}  // namespace millaccess::cli
