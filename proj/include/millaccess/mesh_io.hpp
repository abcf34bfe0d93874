#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "millaccess/errors.hpp"
#include "millaccess/geometry.hpp"

namespace millaccess {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh in millimetres. Immutable after construction.
///
/// Construction drops triangles with repeated indices or area below
/// kMinTriangleArea and recomputes unit normals from the winding order.
class TriangleMesh {
 public:
  static constexpr double kMinTriangleArea = 1e-12;

  TriangleMesh() = default;

  TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
      : vertices_(std::move(vertices)) {
    triangles_.reserve(triangles.size());
    for (const Triangle& t : triangles) {
      for (std::uint32_t idx : t)
        if (idx >= vertices_.size())
          throw InvalidArgument("triangle index " + std::to_string(idx) + " out of range (" +
                                std::to_string(vertices_.size()) + " vertices)");
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
      const Vec3 n = cross(vertices_[t[1]] - vertices_[t[0]], vertices_[t[2]] - vertices_[t[0]]);
      const double area = 0.5 * norm(n);
      if (!(area >= kMinTriangleArea)) continue;
      triangles_.push_back(t);
      normals_.push_back(n / (2.0 * area));
      areas_.push_back(area);
    }
  }

  /// Builds a mesh from a raw soup, merging vertices with bit-identical
  /// coordinates and discarding vertices no triangle references.
  static TriangleMesh from_soup(std::span<const Vec3> positions, std::span<const Triangle> triangles) {
    struct Key {
      std::uint64_t x, y, z;
      bool operator==(const Key&) const = default;
    };
    struct KeyHash {
      std::size_t operator()(const Key& k) const {
        return static_cast<std::size_t>(splitmix64(k.x ^ splitmix64(k.y ^ splitmix64(k.z))));
      }
    };
    const auto bits = [](double v) {
      if (v == 0.0) v = 0.0;  // fold -0.0 into +0.0
      return std::bit_cast<std::uint64_t>(v);
    };

    std::vector<bool> referenced(positions.size(), false);
    for (const Triangle& t : triangles)
      for (std::uint32_t idx : t) {
        if (idx >= positions.size())
          throw ParseError("face references vertex " + std::to_string(idx + 1) + " of " +
                           std::to_string(positions.size()));
        referenced[idx] = true;
      }

    std::unordered_map<Key, std::uint32_t, KeyHash> lookup;
    std::vector<std::uint32_t> remap(positions.size(), 0);
    std::vector<Vec3> unique;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!referenced[i]) continue;
      const Vec3& p = positions[i];
      const Key key{bits(p.x), bits(p.y), bits(p.z)};
      auto [it, inserted] = lookup.try_emplace(key, static_cast<std::uint32_t>(unique.size()));
      if (inserted) unique.push_back(p);
      remap[i] = it->second;
    }
    std::vector<Triangle> tris;
    tris.reserve(triangles.size());
    for (const Triangle& t : triangles) tris.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    return TriangleMesh(std::move(unique), std::move(tris));
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  std::array<Vec3, 3> corners(std::size_t tri) const {
    const Triangle& t = triangles_[tri];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }

  Vec3 centroid(std::size_t tri) const {
    const auto c = corners(tri);
    return (c[0] + c[1] + c[2]) / 3.0;
  }

  Aabb bounds() const {
    Aabb box;
    for (const Triangle& t : triangles_)
      for (std::uint32_t idx : t) box.expand(vertices_[idx]);
    return box;
  }

  double surface_area() const { return std::accumulate(areas_.begin(), areas_.end(), 0.0); }

  /// Content hash over vertex coordinates and triangle indices.
  std::uint64_t content_hash() const {
    Fnv1a h;
    for (const Vec3& v : vertices_) {
      h.update_value(v.x);
      h.update_value(v.y);
      h.update_value(v.z);
    }
    for (const Triangle& t : triangles_) h.update(t.data(), sizeof(Triangle));
    return h.digest();
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
};

struct ValidationReport {
  bool is_manifold = false;
  bool is_watertight = false;
  std::size_t component_count = 0;
  std::size_t boundary_edges = 0;
  double bbox_min_edge = 0.0;
};

/// Edge-based topology checks. Manifold means every edge has exactly two
/// incident triangles that traverse it in opposite directions.
inline ValidationReport validate(const TriangleMesh& mesh) {
  ValidationReport report;
  const auto& tris = mesh.triangles();
  if (tris.empty()) return report;

  struct EdgeUse {
    std::uint32_t count = 0;
    std::int32_t orientation_sum = 0;  // +1 for a->b with a<b, -1 otherwise
    std::uint32_t first_tri = 0;
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(tris.size() * 2);

  std::vector<std::uint32_t> parent(tris.size());
  std::iota(parent.begin(), parent.end(), 0u);
  const auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = tris[t][e];
      const std::uint32_t b = tris[t][(e + 1) % 3];
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
      auto [it, inserted] = edges.try_emplace(key);
      EdgeUse& use = it->second;
      if (inserted) use.first_tri = t;
      else parent[find(t)] = find(use.first_tri);
      ++use.count;
      use.orientation_sum += (a < b) ? 1 : -1;
    }
  }

  bool manifold = true;
  for (const auto& [key, use] : edges) {
    if (use.count == 1) ++report.boundary_edges;
    if (use.count != 2 || use.orientation_sum != 0) manifold = false;
  }
  report.is_manifold = manifold;
  report.is_watertight = report.boundary_edges == 0;

  for (std::uint32_t t = 0; t < tris.size(); ++t)
    if (find(t) == t) ++report.component_count;

  const Vec3 ext = mesh.bounds().extent();
  report.bbox_min_edge = std::min({ext.x, ext.y, ext.z});
  return report;
}

struct ScaleResult {
  TriangleMesh mesh;
  double scale = 1.0;
};

/// Uniformly scales up about the bbox centre until the shortest bbox edge is
/// at least min_edge. Meshes that already satisfy the bound are returned as is.
inline ScaleResult rescale_to_min_edge(const TriangleMesh& mesh, double min_edge = 80.0) {
  const Aabb box = mesh.bounds();
  const Vec3 ext = box.extent();
  const double shortest = std::min({ext.x, ext.y, ext.z});
  if (!(shortest > 0.0)) throw DegenerateBBox("bounding box has a zero-extent axis");
  // Relative slack keeps the operation idempotent under rounding.
  if (shortest >= min_edge * (1.0 - 1e-12)) return {mesh, 1.0};

  const double s = min_edge / shortest;
  const Vec3 c = box.center();
  std::vector<Vec3> verts;
  verts.reserve(mesh.vertex_count());
  for (const Vec3& v : mesh.vertices()) verts.push_back(c + (v - c) * s);
  return {TriangleMesh(std::move(verts), mesh.triangles()), s};
}

inline TriangleMesh normalize_scale(const TriangleMesh& mesh, double min_edge = 80.0) {
  return rescale_to_min_edge(mesh, min_edge).mesh;
}

enum class MeshFormat { obj, stl, ply, automatic };

namespace detail {

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Whitespace tokenizer over a text buffer, line-aware.
class TextScanner {
 public:
  explicit TextScanner(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string_view token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string_view line() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    std::string_view l = text_.substr(start, pos_ - start);
    if (pos_ < text_.size()) ++pos_;
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    return l;
  }

  std::size_t position() const { return pos_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline double parse_double(std::string_view tok, std::string_view what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (tok.empty() || ec != std::errc() || ptr != last)
    throw ParseError("invalid number '" + std::string(tok) + "' in " + std::string(what));
  return v;
}

inline long long parse_int(std::string_view tok, std::string_view what) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (tok.empty() || ec != std::errc() || ptr != last)
    throw ParseError("invalid integer '" + std::string(tok) + "' in " + std::string(what));
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  TextScanner s(line);
  while (!s.at_end()) out.push_back(s.token());
  return out;
}

inline TriangleMesh finish(std::vector<Vec3>& positions, std::vector<Triangle>& tris) {
  TriangleMesh mesh = TriangleMesh::from_soup(positions, tris);
  if (mesh.empty()) throw EmptyMesh("mesh has no non-degenerate triangles");
  return mesh;
}

inline TriangleMesh parse_obj(std::string_view text) {
  std::vector<Vec3> positions;
  std::vector<Triangle> tris;
  TextScanner lines(text);
  std::size_t line_no = 0;
  while (lines.position() < text.size()) {
    ++line_no;
    const auto fields = split_ws(lines.line());
    if (fields.empty() || fields[0].front() == '#') continue;
    const std::string where = "OBJ line " + std::to_string(line_no);
    if (fields[0] == "v") {
      if (fields.size() < 4) throw ParseError(where + ": vertex needs 3 coordinates");
      positions.push_back({parse_double(fields[1], where), parse_double(fields[2], where),
                           parse_double(fields[3], where)});
    } else if (fields[0] == "f") {
      if (fields.size() < 4) throw ParseError(where + ": face needs at least 3 vertices");
      std::vector<std::uint32_t> poly;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const std::string_view ref = fields[i].substr(0, fields[i].find('/'));
        const long long idx = parse_int(ref, where);
        const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(positions.size()) + idx;
        if (idx == 0 || resolved < 0 || resolved >= static_cast<long long>(positions.size()))
          throw ParseError(where + ": face index " + std::to_string(idx) + " out of range");
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) tris.push_back({poly[0], poly[i], poly[i + 1]});
    }
  }
  return finish(positions, tris);
}

template <class T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

inline bool looks_like_ascii_stl(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && (bytes[i] == ' ' || bytes[i] == '\t' || bytes[i] == '\r' || bytes[i] == '\n')) ++i;
  return bytes.substr(i, 5) == "solid" && bytes.find("facet", i) != std::string_view::npos;
}

inline TriangleMesh parse_stl(std::string_view bytes) {
  std::vector<Vec3> positions;
  std::vector<Triangle> tris;
  const bool binary_size_ok =
      bytes.size() >= 84 && 84 + 50ull * load_le<std::uint32_t>(bytes.data() + 80) == bytes.size();
  if (!binary_size_ok && looks_like_ascii_stl(bytes)) {
    TextScanner s(bytes);
    bool closed = false;
    s.token();  // "solid"
    while (!s.at_end()) {
      const std::string_view tok = s.token();
      if (tok == "vertex") {
        Vec3 p;
        for (int a = 0; a < 3; ++a) {
          if (s.at_end()) throw ParseError("ASCII STL: truncated vertex");
          p[a] = parse_double(s.token(), "ASCII STL vertex");
        }
        positions.push_back(p);
      } else if (tok == "endfacet") {
        if (positions.size() != 3 * (tris.size() + 1))
          throw ParseError("ASCII STL: facet without exactly 3 vertices");
        const auto base = static_cast<std::uint32_t>(positions.size() - 3);
        tris.push_back({base, base + 1, base + 2});
      } else if (tok == "endsolid") {
        closed = true;
        break;
      }
    }
    if (!closed) throw ParseError("ASCII STL: missing endsolid (truncated file)");
    if (positions.size() != 3 * tris.size()) throw ParseError("ASCII STL: incomplete facet");
    return finish(positions, tris);
  }
  if (bytes.size() < 84) throw ParseError("binary STL: file shorter than header");
  if (!binary_size_ok) throw ParseError("binary STL: size does not match facet count (truncated file)");
  const std::uint32_t count = load_le<std::uint32_t>(bytes.data() + 80);
  positions.reserve(3ull * count);
  for (std::uint32_t f = 0; f < count; ++f) {
    const char* rec = bytes.data() + 84 + 50ull * f + 12;  // skip stored normal
    for (int v = 0; v < 3; ++v) {
      positions.push_back({load_le<float>(rec + 12 * v), load_le<float>(rec + 12 * v + 4),
                           load_le<float>(rec + 12 * v + 8)});
    }
    tris.push_back({3 * f, 3 * f + 1, 3 * f + 2});
  }
  return finish(positions, tris);
}

enum class PlyEncoding { ascii, binary_le, binary_be };

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

inline std::size_t ply_type_size(std::string_view t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  throw ParseError("PLY: unknown property type '" + std::string(t) + "'");
}

/// Reads PLY scalars from either encoding.
class PlyReader {
 public:
  PlyReader(std::string_view body, PlyEncoding enc) : body_(body), enc_(enc), text_(body) {}

  double read(std::string_view type) {
    if (enc_ == PlyEncoding::ascii) {
      if (text_.at_end()) throw ParseError("PLY: truncated data");
      return parse_double(text_.token(), "PLY body");
    }
    const std::size_t size = ply_type_size(type);
    if (pos_ + size > body_.size()) throw ParseError("PLY: truncated binary data");
    char buf[8];
    std::memcpy(buf, body_.data() + pos_, size);
    pos_ += size;
    const bool swap = (enc_ == PlyEncoding::binary_le) != (std::endian::native == std::endian::little);
    if (swap) std::reverse(buf, buf + size);
    if (type == "char" || type == "int8") return static_cast<std::int8_t>(buf[0]);
    if (type == "uchar" || type == "uint8") return static_cast<std::uint8_t>(buf[0]);
    if (type == "short" || type == "int16") return scalar<std::int16_t>(buf);
    if (type == "ushort" || type == "uint16") return scalar<std::uint16_t>(buf);
    if (type == "int" || type == "int32") return scalar<std::int32_t>(buf);
    if (type == "uint" || type == "uint32") return scalar<std::uint32_t>(buf);
    if (type == "float" || type == "float32") return scalar<float>(buf);
    return scalar<double>(buf);
  }

 private:
  template <class T>
  static double scalar(const char* buf) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  }

  std::string_view body_;
  PlyEncoding enc_;
  TextScanner text_;
  std::size_t pos_ = 0;
};

inline TriangleMesh parse_ply(std::string_view bytes) {
  const std::size_t header_end = bytes.find("end_header");
  if (bytes.substr(0, 3) != "ply" || header_end == std::string_view::npos)
    throw ParseError("PLY: missing magic or end_header");
  std::size_t body_start = bytes.find('\n', header_end);
  if (body_start == std::string_view::npos) throw ParseError("PLY: truncated header");
  ++body_start;

  std::optional<PlyEncoding> encoding;
  std::vector<PlyElement> elements;
  TextScanner header(bytes.substr(0, header_end));
  while (header.position() < header_end) {
    const auto f = split_ws(header.line());
    if (f.empty()) continue;
    if (f[0] == "format" && f.size() >= 2) {
      if (f[1] == "ascii") encoding = PlyEncoding::ascii;
      else if (f[1] == "binary_little_endian") encoding = PlyEncoding::binary_le;
      else if (f[1] == "binary_big_endian") encoding = PlyEncoding::binary_be;
      else throw ParseError("PLY: unknown format '" + std::string(f[1]) + "'");
    } else if (f[0] == "element" && f.size() >= 3) {
      elements.push_back({std::string(f[1]), static_cast<std::size_t>(parse_int(f[2], "PLY header")), {}});
    } else if (f[0] == "property") {
      if (elements.empty()) throw ParseError("PLY: property before element");
      if (f.size() >= 5 && f[1] == "list")
        elements.back().properties.push_back({std::string(f[4]), std::string(f[3]), true, std::string(f[2])});
      else if (f.size() >= 3)
        elements.back().properties.push_back({std::string(f[2]), std::string(f[1]), false, {}});
      else
        throw ParseError("PLY: malformed property line");
    }
  }
  if (!encoding) throw ParseError("PLY: missing format line");

  std::vector<Vec3> positions;
  std::vector<Triangle> tris;
  PlyReader reader(bytes.substr(body_start), *encoding);
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    for (std::size_t item = 0; item < el.count; ++item) {
      Vec3 p;
      std::vector<std::uint32_t> poly;
      for (const PlyProperty& prop : el.properties) {
        if (prop.is_list) {
          const double n = reader.read(prop.count_type);
          if (n < 0) throw ParseError("PLY: negative list length");
          const bool indices = is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index");
          for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            const double v = reader.read(prop.type);
            if (indices) {
              if (v < 0) throw ParseError("PLY: negative vertex index");
              poly.push_back(static_cast<std::uint32_t>(v));
            }
          }
        } else {
          const double v = reader.read(prop.type);
          if (is_vertex) {
            if (prop.name == "x") p.x = v;
            else if (prop.name == "y") p.y = v;
            else if (prop.name == "z") p.z = v;
          }
        }
      }
      if (is_vertex) positions.push_back(p);
      if (is_face) {
        if (poly.size() < 3) throw ParseError("PLY: face with fewer than 3 vertices");
        for (std::size_t i = 1; i + 1 < poly.size(); ++i) tris.push_back({poly[0], poly[i], poly[i + 1]});
      }
    }
  }
  return finish(positions, tris);
}

inline void append_le(std::string& out, const void* data, std::size_t size) {
  const auto* b = static_cast<const char*>(data);
  if constexpr (std::endian::native == std::endian::little) {
    out.append(b, size);
  } else {
    for (std::size_t i = size; i-- > 0;) out.push_back(b[i]);
  }
}

}  // namespace detail

inline MeshFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".stl") return MeshFormat::stl;
  if (ext == ".ply") return MeshFormat::ply;
  throw ParseError("unrecognised mesh extension '" + ext + "'");
}

inline TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::automatic) {
  if (format == MeshFormat::automatic) format = format_from_extension(path);
  const std::string bytes = detail::read_file_bytes(path);
  switch (format) {
    case MeshFormat::obj: return detail::parse_obj(bytes);
    case MeshFormat::stl: return detail::parse_stl(bytes);
    case MeshFormat::ply: return detail::parse_ply(bytes);
    case MeshFormat::automatic: break;
  }
  throw ParseError("unsupported mesh format");
}

using Rgb = std::array<std::uint8_t, 3>;

/// Binary little-endian PLY with double-precision vertices and, when
/// face_colors is non-empty, one uchar RGB triple per face.
inline void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
                      std::span<const Rgb> face_colors = {}) {
  if (!face_colors.empty() && face_colors.size() != mesh.triangle_count())
    throw InvalidArgument("face color count does not match triangle count");
  std::string out = "ply\nformat binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(mesh.vertex_count()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "element face " + std::to_string(mesh.triangle_count()) + "\n";
  out += "property list uchar int vertex_indices\n";
  if (!face_colors.empty()) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";
  for (const Vec3& v : mesh.vertices()) {
    detail::append_le(out, &v.x, 8);
    detail::append_le(out, &v.y, 8);
    detail::append_le(out, &v.z, 8);
  }
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    out.push_back(static_cast<char>(3));
    for (std::uint32_t idx : mesh.triangles()[t]) {
      const auto i = static_cast<std::int32_t>(idx);
      detail::append_le(out, &i, 4);
    }
    if (!face_colors.empty())
      for (std::uint8_t c : face_colors[t]) out.push_back(static_cast<char>(c));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

/// Plain OBJ writer, used for fixtures and debugging.
inline void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot write " + path.string());
  file.precision(17);
  for (const Vec3& v : mesh.vertices()) file << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const Triangle& t : mesh.triangles()) file << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (!file) throw IoError("write failed for " + path.string());
}

}  // namespace millaccess
