#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "millaccess/accessibility.hpp"
#include "millaccess/cutter.hpp"
#include "millaccess/errors.hpp"
#include "millaccess/mesh_io.hpp"
#include "millaccess/sampling.hpp"

namespace millaccess {

inline constexpr std::string_view kEngineVersion = "1.0.0";

struct RecordMeta {
  std::uint64_t seed = 0;
  std::string engine_version{kEngineVersion};
  AccessibilityOptions options;
  double normalization_scale = 1.0;  // normalized = (p - center) * scale
  Vec3 normalization_center;
};

/// One shape's labelled point set. Only the fields below `meta` are stored
/// in the .dma file; meta goes to the manifest.
struct DatasetRecord {
  std::string shape_id;
  Cutter cutter;
  std::size_t direction_count = 0;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<std::uint8_t> label_i;
  std::vector<std::uint8_t> label_o;
  bool normalized = false;
  RecordMeta meta;

  std::size_t size() const { return points.size(); }
};

/// Maps points into [-1, 1]^3 by a uniform scale about the bbox centre,
/// recording the transform in meta.
inline void normalize_record(DatasetRecord& rec) {
  if (rec.normalized || rec.points.empty()) {
    rec.normalized = true;
    return;
  }
  Aabb box;
  for (const Vec3& p : rec.points) box.expand(p);
  const Vec3 ext = box.extent();
  const double half = 0.5 * std::max({ext.x, ext.y, ext.z});
  const double scale = half > 0 ? 1.0 / half : 1.0;
  const Vec3 c = box.center();
  for (Vec3& p : rec.points) {
    p = (p - c) * scale;
    for (int a = 0; a < 3; ++a) p[a] = std::clamp(p[a], -1.0, 1.0);
  }
  rec.normalized = true;
  rec.meta.normalization_scale = scale;
  rec.meta.normalization_center = c;
}

namespace detail {

inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

inline std::string format_record(const DatasetRecord& rec) {
  const std::size_t n = rec.size();
  if (rec.normals.size() != n || rec.label_i.size() != n || rec.label_o.size() != n)
    throw FormatError("record rows disagree: points/normals/labels differ in length");
  using detail::format_g9;
  std::string out;
  out.reserve(64 * (n + 5));
  out += "DMA 1\n";
  out += "shape " + rec.shape_id + "\n";
  out += "cutter " + format_g9(rec.cutter.ball_radius) + " " + format_g9(rec.cutter.body_height) + " " +
         format_g9(rec.cutter.holder_radius) + " " + format_g9(rec.cutter.holder_height) + "\n";
  out += "counts " + std::to_string(n) + " " + std::to_string(rec.direction_count) + "\n";
  out += std::string("normalized ") + (rec.normalized ? "1" : "0") + "\n";
  char line[512];
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = rec.points[i];
    const Vec3& nn = rec.normals[i];
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g %.9g %.9g %.9g %d %d\n", p.x, p.y, p.z, nn.x, nn.y, nn.z,
                  rec.label_i[i] ? 1 : 0, rec.label_o[i] ? 1 : 0);
    out += line;
  }
  return out;
}

inline void write_record(const DatasetRecord& rec, const std::filesystem::path& path) {
  const std::string text = format_record(rec);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

inline DatasetRecord parse_record(std::string_view text, double sigma = kDefaultSigma) {
  detail::TextScanner lines(text);
  std::size_t line_no = 0;
  const auto next_fields = [&](std::string_view expect_key) {
    if (lines.position() >= text.size()) throw FormatError("truncated header: missing '" + std::string(expect_key) + "'");
    ++line_no;
    const std::string_view l = lines.line();
    auto f = detail::split_ws(l);
    if (f.empty() || f[0] != expect_key)
      throw FormatError("line " + std::to_string(line_no) + ": expected '" + std::string(expect_key) + "'");
    return std::pair{f, l};
  };
  const auto as_double = [&](std::string_view tok) {
    try {
      return detail::parse_double(tok, "record");
    } catch (const ParseError& e) {
      throw FormatError(e.what());
    }
  };
  const auto as_count = [&](std::string_view tok) {
    long long v = 0;
    try {
      v = detail::parse_int(tok, "record");
    } catch (const ParseError& e) {
      throw FormatError(e.what());
    }
    if (v < 0) throw FormatError("negative count");
    return static_cast<std::size_t>(v);
  };

  DatasetRecord rec;
  {
    auto [f, l] = next_fields("DMA");
    if (f.size() != 2 || f[1] != "1") throw FormatError("bad magic: expected 'DMA 1'");
  }
  {
    auto [f, l] = next_fields("shape");
    if (f.size() < 2) throw FormatError("missing shape id");
    rec.shape_id = std::string(l.substr(std::string_view("shape ").size()));
  }
  {
    auto [f, l] = next_fields("cutter");
    if (f.size() != 5) throw FormatError("cutter line needs 4 values");
    rec.cutter = Cutter{as_double(f[1]), as_double(f[2]), as_double(f[3]), as_double(f[4]), 0.0};
    rec.cutter.shaft_radius = rec.cutter.holder_radius + sigma;
  }
  std::size_t n = 0;
  {
    auto [f, l] = next_fields("counts");
    if (f.size() != 3) throw FormatError("counts line needs n and m");
    n = as_count(f[1]);
    rec.direction_count = as_count(f[2]);
  }
  {
    auto [f, l] = next_fields("normalized");
    if (f.size() != 2 || (f[1] != "0" && f[1] != "1")) throw FormatError("normalized must be 0 or 1");
    rec.normalized = f[1] == "1";
  }
  rec.points.reserve(n);
  rec.normals.reserve(n);
  rec.label_i.reserve(n);
  rec.label_o.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (lines.position() >= text.size())
      throw FormatError("row mismatch: header says " + std::to_string(n) + " rows, found " + std::to_string(i));
    ++line_no;
    const auto f = detail::split_ws(lines.line());
    if (f.size() != 8) throw FormatError("line " + std::to_string(line_no) + ": expected 8 fields");
    rec.points.push_back({as_double(f[0]), as_double(f[1]), as_double(f[2])});
    rec.normals.push_back({as_double(f[3]), as_double(f[4]), as_double(f[5])});
    for (int k = 6; k < 8; ++k)
      if (f[k] != "0" && f[k] != "1") throw FormatError("line " + std::to_string(line_no) + ": labels must be 0/1");
    rec.label_i.push_back(f[6] == "1");
    rec.label_o.push_back(f[7] == "1");
  }
  while (lines.position() < text.size()) {
    if (!detail::split_ws(lines.line()).empty())
      throw FormatError("row mismatch: more rows than the header's " + std::to_string(n));
  }
  return rec;
}

inline DatasetRecord read_record(const std::filesystem::path& path) {
  return parse_record(detail::read_file_bytes(path));
}

/// Prediction file: one "l_I l_O" line per site.
struct Predictions {
  std::vector<std::uint8_t> label_i;
  std::vector<std::uint8_t> label_o;
};

inline Predictions read_predictions(const std::filesystem::path& path) {
  const std::string text = detail::read_file_bytes(path);
  detail::TextScanner lines(text);
  Predictions p;
  std::size_t line_no = 0;
  while (lines.position() < text.size()) {
    ++line_no;
    const auto f = detail::split_ws(lines.line());
    if (f.empty()) continue;
    if (f.size() != 2 || (f[0] != "0" && f[0] != "1") || (f[1] != "0" && f[1] != "1"))
      throw FormatError("prediction line " + std::to_string(line_no) + ": expected '<0|1> <0|1>'");
    p.label_i.push_back(f[0] == "1");
    p.label_o.push_back(f[1] == "1");
  }
  return p;
}

struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::size_t n_sites = 7000;
  std::size_t m_directions = 150;
  std::size_t lloyd_iters = 10;
  std::string preset = "uniform";
  std::uint64_t seed = 0;
  bool normalize = true;
  double min_bbox_edge = 80.0;
  DirectionMode direction_mode = DirectionMode::fibonacci;
  std::size_t azimuth_count = 0;  // latlong only
  AccessibilityOptions options;
};

inline nlohmann::ordered_json options_to_json(const AccessibilityOptions& o) {
  return {{"sigma", o.sigma},
          {"occlusion_fraction", o.occlusion_fraction},
          {"epsilon", o.epsilon},
          {"prefilter", o.prefilter},
          {"shaft_mode", std::string(to_string(o.shaft_mode))}};
}

inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  return {{"input_dir", c.input_dir.generic_string()},
          {"output_dir", c.output_dir.generic_string()},
          {"n_sites", c.n_sites},
          {"m_directions", c.m_directions},
          {"lloyd_iters", c.lloyd_iters},
          {"preset", c.preset},
          {"seed", c.seed},
          {"normalize", c.normalize},
          {"min_bbox_edge", c.min_bbox_edge},
          {"direction_mode", std::string(to_string(c.direction_mode))},
          {"azimuth_count", c.azimuth_count},
          {"options", options_to_json(c.options)}};
}

/// Reads a config object; absent keys keep their defaults, unknown keys are rejected.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"input_dir", "output_dir", "n_sites", "m_directions", "lloyd_iters",
                                           "preset", "seed", "normalize", "min_bbox_edge", "direction_mode",
                                           "azimuth_count", "options"};
  static const std::set<std::string> known_options{"sigma", "occlusion_fraction", "epsilon", "prefilter",
                                                   "shaft_mode"};
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw InvalidArgument("unknown config key '" + k + "'");
  PipelineConfig c;
  try {
    if (j.contains("input_dir")) c.input_dir = j["input_dir"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("n_sites")) c.n_sites = j["n_sites"].get<std::size_t>();
    if (j.contains("m_directions")) c.m_directions = j["m_directions"].get<std::size_t>();
    if (j.contains("lloyd_iters")) c.lloyd_iters = j["lloyd_iters"].get<std::size_t>();
    if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("normalize")) c.normalize = j["normalize"].get<bool>();
    if (j.contains("min_bbox_edge")) c.min_bbox_edge = j["min_bbox_edge"].get<double>();
    if (j.contains("direction_mode")) c.direction_mode = direction_mode_from_name(j["direction_mode"].get<std::string>());
    if (j.contains("azimuth_count")) c.azimuth_count = j["azimuth_count"].get<std::size_t>();
    if (j.contains("options")) {
      const auto& o = j["options"];
      for (const auto& [k, v] : o.items())
        if (!known_options.count(k)) throw InvalidArgument("unknown options key '" + k + "'");
      if (o.contains("sigma")) c.options.sigma = o["sigma"].get<double>();
      if (o.contains("occlusion_fraction")) c.options.occlusion_fraction = o["occlusion_fraction"].get<double>();
      if (o.contains("epsilon")) c.options.epsilon = o["epsilon"].get<double>();
      if (o.contains("prefilter")) c.options.prefilter = o["prefilter"].get<bool>();
      if (o.contains("shaft_mode")) c.options.shaft_mode = shaft_mode_from_name(o["shaft_mode"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  const std::string text = detail::read_file_bytes(path);
  try {
    return config_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
}

/// Seed for one shape, from the run seed and the shape id only.
inline std::uint64_t shape_seed(std::uint64_t run_seed, std::string_view shape_id) {
  Fnv1a h;
  h.update(shape_id.data(), shape_id.size());
  return splitmix64(run_seed ^ splitmix64(h.digest()));
}

inline nlohmann::ordered_json cutter_to_json(const Cutter& c) {
  return {{"CR", c.ball_radius}, {"CH", c.body_height}, {"FR", c.holder_radius}, {"FH", c.holder_height}};
}

inline DirectionSet directions_for(const PipelineConfig& c) {
  return sample_directions(c.m_directions, c.direction_mode, c.azimuth_count);
}

struct PipelineSummary {
  std::size_t shapes_ok = 0;
  std::size_t shapes_skipped = 0;
  std::filesystem::path manifest_path;
};

inline bool is_mesh_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".obj" || ext == ".stl" || ext == ".ply";
}

/// Why a mesh is unsuitable for the dataset, or empty if it passes.
inline std::string rejection_reason(const ValidationReport& v) {
  if (!v.is_watertight) return "not watertight";
  if (!v.is_manifold) return "not manifold";
  if (v.component_count != 1) return "multiple components";
  return {};
}

/// Runs load -> validate -> rescale -> sample -> random cutter -> analyze
/// over every mesh file in input_dir (in filename order) and writes one
/// .dma record per accepted shape, manifest.json and timing.json.
/// Shapes that fail validation are skipped and listed with a reason.
inline PipelineSummary run_pipeline(const PipelineConfig& config, unsigned threads = 1,
                                    std::ostream* log = &std::cerr) {
  namespace fs = std::filesystem;
  if (config.n_sites == 0 || config.m_directions == 0) throw InvalidCount("n_sites and m_directions must be >= 1");
  const CutterPreset preset = CutterPreset::from_name(config.preset);
  config.options.check();
  if (!fs::is_directory(config.input_dir)) throw IoError("input directory not found: " + config.input_dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config.input_dir))
    if (entry.is_regular_file() && is_mesh_file(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw EmptyInputDir("no .obj/.stl/.ply files in " + config.input_dir.string());

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());

  const DirectionSet dirs = directions_for(config);
  AccessibilityOptions options = config.options;
  options.threads = threads;

  nlohmann::ordered_json shapes = nlohmann::ordered_json::array();
  nlohmann::ordered_json timing = nlohmann::ordered_json::array();
  std::set<std::string> seen_ids;
  PipelineSummary summary;

  for (const fs::path& file : files) {
    const std::string id = file.stem().string();
    nlohmann::ordered_json entry{{"shape_id", id}, {"file", file.filename().string()}};
    const auto skip = [&](const std::string& reason) {
      entry["status"] = "skipped";
      entry["reason"] = reason;
      ++summary.shapes_skipped;
      if (log) *log << "skip " << file.filename().string() << ": " << reason << "\n";
    };
    if (!seen_ids.insert(id).second) {
      skip("duplicate shape id");
      shapes.push_back(entry);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const TriangleMesh loaded = load_mesh(file);
      const std::string reason = rejection_reason(validate(loaded));
      if (!reason.empty()) {
        skip(reason);
        shapes.push_back(entry);
        continue;
      }
      const ScaleResult scaled = rescale_to_min_edge(loaded, config.min_bbox_edge);
      const std::uint64_t seed = shape_seed(config.seed, id);
      const SurfaceSamples samples = sample_surface(scaled.mesh, config.n_sites, config.lloyd_iters, seed, threads);
      const Cutter cutter = random_cutter(preset, splitmix64(seed + 1), options.sigma);
      const DensityReport density = check_sampling_density(samples, cutter);
      if (!density.ok && log)
        *log << "warning " << id << ": max site gap " << density.max_neighbor_gap << " mm >= CR "
             << cutter.ball_radius << " mm\n";
      const AccessibilityReport report = analyze(samples, dirs, cutter, options);

      DatasetRecord rec;
      rec.shape_id = id;
      rec.cutter = cutter;
      rec.direction_count = dirs.size();
      rec.points = samples.sites;
      rec.normals = samples.normals;
      rec.label_i = report.inaccessible;
      rec.label_o = report.occlusion;
      rec.meta.seed = seed;
      rec.meta.options = config.options;
      if (config.normalize) normalize_record(rec);
      const std::string record_name = id + ".dma";
      write_record(rec, config.output_dir / record_name);

      entry["status"] = "ok";
      entry["record"] = record_name;
      entry["seed"] = seed;
      entry["cutter"] = cutter_to_json(cutter);
      entry["n"] = samples.size();
      entry["m"] = dirs.size();
      entry["inaccessible"] = report.inaccessible_count();
      entry["occlusion"] = report.occlusion_count();
      entry["scale_to_min_edge"] = scaled.scale;
      entry["normalization"] = {{"center", {rec.meta.normalization_center.x, rec.meta.normalization_center.y,
                                            rec.meta.normalization_center.z}},
                                {"scale", rec.meta.normalization_scale}};
      entry["density"] = {{"max_neighbor_gap", density.max_neighbor_gap}, {"ok", density.ok}};
      ++summary.shapes_ok;
      timing.push_back({{"shape_id", id},
                        {"label_seconds", report.meta.label_seconds},
                        {"occlusion_seconds", report.meta.occlusion_seconds},
                        {"total_seconds", detail::seconds_since(t0)}});
      if (log)
        *log << "ok " << id << ": n=" << samples.size() << " inaccessible=" << report.inaccessible_count()
             << " occlusion=" << report.occlusion_count() << "\n";
    } catch (const ParseError& e) {
      skip(std::string("parse error: ") + e.what());
    } catch (const EmptyMesh& e) {
      skip(std::string("empty mesh: ") + e.what());
    } catch (const DegenerateBBox& e) {
      skip(std::string("degenerate bounding box: ") + e.what());
    }
    shapes.push_back(entry);
  }

  nlohmann::ordered_json manifest{{"engine_version", std::string(kEngineVersion)},
                                  {"config", config_to_json(config)},
                                  {"shape_count", files.size()},
                                  {"shapes_ok", summary.shapes_ok},
                                  {"shapes_skipped", summary.shapes_skipped},
                                  {"shapes", shapes}};
  summary.manifest_path = config.output_dir / "manifest.json";
  const auto dump = [](const nlohmann::ordered_json& j, const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + p.string());
  };
  dump(manifest, summary.manifest_path);
  dump(nlohmann::ordered_json{{"shapes", timing}}, config.output_dir / "timing.json");
  return summary;
}

}  // namespace millaccess
