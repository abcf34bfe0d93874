#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "millaccess/cutter.hpp"
#include "millaccess/errors.hpp"
#include "millaccess/geometry.hpp"
#include "millaccess/mesh_io.hpp"
#include "millaccess/parallel.hpp"
#include "millaccess/random.hpp"
#include "millaccess/spatial.hpp"

namespace millaccess {

/// Surface sites with their normals and owning triangles.
struct SurfaceSamples {
  std::vector<Vec3> sites;
  std::vector<Vec3> normals;
  std::vector<std::uint32_t> site_triangle;
  std::uint64_t mesh_hash = 0;

  std::size_t size() const { return sites.size(); }
  bool empty() const { return sites.empty(); }
};

/// Wraps bare points as samples, e.g. sites read back from a record.
/// Triangle indices are zero and normals default to +Z.
inline SurfaceSamples samples_from_points(std::span<const Vec3> points) {
  SurfaceSamples s;
  s.sites.assign(points.begin(), points.end());
  s.normals.assign(points.size(), Vec3{0, 0, 1});
  s.site_triangle.assign(points.size(), 0);
  return s;
}

namespace detail {

/// Area-weighted random surface points, each tagged with its triangle.
class AreaSampler {
 public:
  explicit AreaSampler(TriangleMesh&&) = delete;  // keeps a pointer to the mesh
  explicit AreaSampler(const TriangleMesh& mesh) : mesh_(&mesh) {
    cdf_.reserve(mesh.triangle_count());
    double acc = 0.0;
    for (double a : mesh.areas()) cdf_.push_back(acc += a);
  }

  std::pair<Vec3, std::uint32_t> draw(Rng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    const auto tri = static_cast<std::uint32_t>(it - cdf_.begin());
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const auto c = mesh_->corners(tri);
    return {c[0] * (1.0 - r1) + c[1] * (r1 * (1.0 - r2)) + c[2] * (r1 * r2), tri};
  }

 private:
  const TriangleMesh* mesh_;
  std::vector<double> cdf_;
};

inline constexpr std::uint64_t kAuxStream = 0x5a17c0ffee5eedULL;

/// (cos, sin) of 2*pi*a/count. Values outside the first octant are derived
/// from it by exact sign flips and swaps, so the azimuth set is closed under
/// the reflections (and, for count % 4 == 0, quarter turns) it admits.
inline std::pair<double, double> unit_azimuth(std::size_t a, std::size_t count) {
  if (count % 2 == 0) {
    if (2 * a > count) {
      const auto [c, s] = unit_azimuth(count - a, count);
      return {c, -s};
    }
    if (4 * a > count) {
      const auto [c, s] = unit_azimuth(count / 2 - a, count);
      return {-c, s};
    }
    if (count % 4 == 0 && 8 * a > count) {
      const auto [c, s] = unit_azimuth(count / 4 - a, count);
      return {s, c};
    }
  }
  const double phi = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(count);
  return {std::cos(phi), std::sin(phi)};
}

}  // namespace detail

struct LloydTrace {
  /// Quantization energy of the auxiliary points before each iteration and
  /// after the last one (lloyd_iters + 1 entries).
  std::vector<double> energy;
};

/// Approximate centroidal Voronoi sampling of the mesh surface.
///
/// Sites start as area-weighted random points. Each Lloyd iteration assigns
/// a fixed auxiliary sample set (30 points per site) to the nearest site,
/// moves every site to its cluster centroid and projects it back onto the
/// closest point of the surface. Sites with an empty cluster stay put.
inline SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t n, std::size_t lloyd_iters,
                                     std::uint64_t seed, unsigned threads = 1, LloydTrace* trace = nullptr) {
  if (n == 0) throw InvalidCount("site count must be at least 1");
  if (mesh.empty()) throw EmptyMesh("cannot sample an empty mesh");

  const detail::AreaSampler sampler(mesh);
  SurfaceSamples out;
  out.mesh_hash = mesh.content_hash();
  out.sites.reserve(n);
  out.site_triangle.reserve(n);
  Rng init_rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    auto [p, tri] = sampler.draw(init_rng);
    out.sites.push_back(p);
    out.site_triangle.push_back(tri);
  }

  if (lloyd_iters > 0) {
    const std::size_t aux_count = 30 * n;
    std::vector<Vec3> aux;
    aux.reserve(aux_count);
    Rng aux_rng(splitmix64(seed ^ detail::kAuxStream));
    for (std::size_t i = 0; i < aux_count; ++i) aux.push_back(sampler.draw(aux_rng).first);

    const TriangleBvh bvh(mesh);
    const Aabb domain = mesh.bounds();
    std::vector<std::uint32_t> owner(aux_count);
    std::vector<double> owner_d2(aux_count);

    const auto assign = [&] {
      const PointGrid grid(out.sites, domain);
      parallel_for(aux_count, threads, [&](std::size_t a) {
        const auto hit = grid.nearest(aux[a]);
        owner[a] = hit.index;
        owner_d2[a] = hit.squared_distance;
      });
      double energy = 0.0;
      for (double d2 : owner_d2) energy += d2;
      return energy;
    };

    for (std::size_t iter = 0; iter < lloyd_iters; ++iter) {
      const double energy = assign();
      if (trace) trace->energy.push_back(energy);
      std::vector<Vec3> sum(n);
      std::vector<std::uint32_t> count(n, 0);
      for (std::size_t a = 0; a < aux_count; ++a) {
        sum[owner[a]] += aux[a];
        ++count[owner[a]];
      }
      parallel_for(n, threads, [&](std::size_t i) {
        if (count[i] == 0) return;
        const SurfacePoint proj = bvh.closest(sum[i] / static_cast<double>(count[i]));
        out.sites[i] = proj.point;
        out.site_triangle[i] = proj.triangle;
      });
    }
    if (trace) trace->energy.push_back(assign());
  }

  out.normals.reserve(n);
  for (std::uint32_t tri : out.site_triangle) out.normals.push_back(mesh.normals()[tri]);
  return out;
}

struct DensityReport {
  double max_neighbor_gap = std::numeric_limits<double>::infinity();
  bool ok = false;
};

/// Largest nearest-neighbour distance among sites, compared to the ball
/// radius. A failing check is advisory; analysis still runs.
inline DensityReport check_sampling_density(const SurfaceSamples& samples, const Cutter& cutter) {
  if (samples.empty()) throw EmptyInput("no samples");
  DensityReport report;
  if (samples.size() < 2) return report;
  Aabb box;
  for (const Vec3& p : samples.sites) box.expand(p);
  const PointGrid grid(samples.sites, box);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    worst = std::max(worst, grid.nearest(samples.sites[i], static_cast<std::uint32_t>(i)).squared_distance);
  report.max_neighbor_gap = std::sqrt(worst);
  report.ok = report.max_neighbor_gap < cutter.ball_radius;
  return report;
}

enum class DirectionMode { fibonacci, latlong };

inline std::string_view to_string(DirectionMode m) { return m == DirectionMode::fibonacci ? "fibonacci" : "latlong"; }

inline DirectionMode direction_mode_from_name(std::string_view name) {
  if (name == "fibonacci") return DirectionMode::fibonacci;
  if (name == "latlong") return DirectionMode::latlong;
  throw InvalidArgument("unknown direction mode '" + std::string(name) + "'");
}

/// Unit cutter-axis directions on the upper hemisphere (z >= 0).
struct DirectionSet {
  std::vector<Vec3> directions;
  DirectionMode mode = DirectionMode::fibonacci;

  std::size_t size() const { return directions.size(); }
  bool empty() const { return directions.empty(); }
};

/// Fibonacci mode: z_k = k / (m - 0.5), azimuth k times the golden angle.
/// Latlong mode: the pole followed by rings at polar angle
/// (j + 0.5) * (pi/2) / rings, each with azimuth_count azimuths from 0;
/// m must equal rings * azimuth_count + 1.
inline DirectionSet sample_directions(std::size_t m, DirectionMode mode = DirectionMode::fibonacci,
                                      std::size_t azimuth_count = 0) {
  if (m == 0) throw InvalidCount("direction count must be at least 1");
  DirectionSet set;
  set.mode = mode;
  set.directions.reserve(m);
  const auto unit = [](double theta_cos, double phi) {
    const double z = theta_cos;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec3 d{r * std::cos(phi), r * std::sin(phi), z};
    return normalized(d);
  };
  if (mode == DirectionMode::fibonacci) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < m; ++k) {
      const double z = static_cast<double>(k) / (static_cast<double>(m) - 0.5);
      set.directions.push_back(unit(z, static_cast<double>(k) * golden));
    }
    return set;
  }
  if (azimuth_count == 0 || (m - 1) % azimuth_count != 0)
    throw InvalidCount("latlong needs m = rings * azimuth_count + 1 (m=" + std::to_string(m) +
                       ", azimuth_count=" + std::to_string(azimuth_count) + ")");
  const std::size_t rings = (m - 1) / azimuth_count;
  set.directions.push_back({0.0, 0.0, 1.0});
  for (std::size_t j = 0; j < rings; ++j) {
    const double theta = (static_cast<double>(j) + 0.5) * (std::numbers::pi / 2.0) / static_cast<double>(rings);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    for (std::size_t a = 0; a < azimuth_count; ++a) {
      const auto [c, s] = detail::unit_azimuth(a, azimuth_count);
      set.directions.push_back(normalized(Vec3{st * c, st * s, ct}));
    }
  }
  return set;
}

/// Latlong set from ring and azimuth counts.
inline DirectionSet latlong_directions(std::size_t rings, std::size_t azimuth_count) {
  return sample_directions(rings * azimuth_count + 1, DirectionMode::latlong, azimuth_count);
}

/// Cell-centre grid points of the bounding box that lie outside a closed mesh.
struct VolumeSamples {
  std::vector<Vec3> points;
  std::array<int, 3> grid_resolution{0, 0, 0};
  double cell_size = 0.0;
  std::size_t grid_point_count = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Grid layout shared by sample_volume and its tests: cell size is
/// longest_edge / resolution, each axis holds floor(extent / cell) cells
/// (at least one), centred in the bounding box.
struct VolumeGrid {
  Vec3 origin;  // centre of cell (0, 0, 0)
  double cell = 0.0;
  std::array<int, 3> dims{0, 0, 0};

  static VolumeGrid over(const Aabb& box, int resolution) {
    VolumeGrid g;
    const Vec3 ext = box.extent();
    const double longest = std::max({ext.x, ext.y, ext.z});
    g.cell = longest / resolution;
    for (int a = 0; a < 3; ++a) {
      g.dims[a] = std::max(1, static_cast<int>(std::floor(ext[a] / g.cell + 1e-9)));
      g.origin[a] = box.center()[a] - 0.5 * g.dims[a] * g.cell + 0.5 * g.cell;
    }
    return g;
  }

  std::size_t count() const { return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]; }

  Vec3 point(std::size_t flat) const {
    const auto i = static_cast<int>(flat % dims[0]);
    const auto j = static_cast<int>((flat / dims[0]) % dims[1]);
    const auto k = static_cast<int>(flat / (static_cast<std::size_t>(dims[0]) * dims[1]));
    return {origin.x + i * cell, origin.y + j * cell, origin.z + k * cell};
  }
};

inline VolumeSamples sample_volume(const TriangleMesh& mesh, int resolution) {
  if (resolution < 2) throw InvalidCount("volume resolution must be at least 2");
  if (mesh.empty()) throw EmptyMesh("cannot sample an empty mesh");
  if (!validate(mesh).is_watertight) throw NotWatertight("volume sampling requires a watertight mesh");
  const VolumeGrid grid = VolumeGrid::over(mesh.bounds(), resolution);
  const ContainmentTester inside(mesh);
  VolumeSamples out;
  out.grid_resolution = grid.dims;
  out.cell_size = grid.cell;
  out.grid_point_count = grid.count();
  for (std::size_t f = 0; f < grid.count(); ++f) {
    const Vec3 p = grid.point(f);
    if (!inside.inside_or_on(p)) out.points.push_back(p);
  }
  return out;
}

/// One line per site: "x y z nx ny nz" with 9 significant digits.
inline void write_sites(const SurfaceSamples& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char line[256];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec3& p = samples.sites[i];
    const Vec3& n = samples.normals[i];
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g %.9g %.9g %.9g\n", p.x, p.y, p.z, n.x, n.y, n.z);
    out << line;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace millaccess
