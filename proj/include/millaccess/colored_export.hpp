#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "millaccess/accessibility.hpp"
#include "millaccess/errors.hpp"
#include "millaccess/mesh_io.hpp"
#include "millaccess/sampling.hpp"

namespace millaccess {

inline constexpr Rgb kColorNeither{200, 200, 200};
inline constexpr Rgb kColorInaccessible{255, 0, 0};
inline constexpr Rgb kColorOcclusion{0, 255, 0};
inline constexpr Rgb kColorBoth{255, 255, 0};

inline Rgb label_color(bool inaccessible, bool occlusion) {
  if (inaccessible && occlusion) return kColorBoth;
  if (inaccessible) return kColorInaccessible;
  if (occlusion) return kColorOcclusion;
  return kColorNeither;
}

/// Site owning each triangle. A triangle that hosts sites takes the hosted
/// site closest to its centroid; any other triangle takes the globally
/// nearest site. Ties go to the lower site index.
inline std::vector<std::uint32_t> assign_triangles_to_sites(const TriangleMesh& mesh, std::span<const Vec3> sites,
                                                            std::span<const std::uint32_t> site_triangle = {}) {
  if (sites.empty()) throw EmptyInput("no sites to assign");
  const std::size_t nt = mesh.triangle_count();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> owner(nt, kUnset);
  std::vector<double> owner_d2(nt, std::numeric_limits<double>::infinity());
  if (site_triangle.size() == sites.size()) {
    for (std::uint32_t s = 0; s < sites.size(); ++s) {
      const std::uint32_t t = site_triangle[s];
      if (t >= nt) continue;
      const double d2 = squared_distance(sites[s], mesh.centroid(t));
      if (d2 < owner_d2[t]) {
        owner_d2[t] = d2;
        owner[t] = s;
      }
    }
  }
  Aabb box;
  for (const Vec3& p : sites) box.expand(p);
  const PointGrid grid(sites, box);
  for (std::size_t t = 0; t < nt; ++t)
    if (owner[t] == kUnset) owner[t] = grid.nearest(mesh.centroid(t)).index;
  return owner;
}

/// Per-triangle label colours from per-site labels.
inline std::vector<Rgb> label_face_colors(const TriangleMesh& mesh, std::span<const Vec3> sites,
                                          std::span<const std::uint32_t> site_triangle,
                                          std::span<const std::uint8_t> inaccessible,
                                          std::span<const std::uint8_t> occlusion) {
  if (inaccessible.size() != sites.size() || occlusion.size() != sites.size())
    throw LengthMismatch("label vectors do not match the site count");
  const auto owner = assign_triangles_to_sites(mesh, sites, site_triangle);
  std::vector<Rgb> colors(owner.size());
  for (std::size_t t = 0; t < owner.size(); ++t)
    colors[t] = label_color(inaccessible[owner[t]] != 0, occlusion[owner[t]] != 0);
  return colors;
}

/// Writes the mesh as binary PLY with faces coloured by their site's labels:
/// grey (neither), red (inaccessible), green (occlusion), yellow (both).
inline void export_colored_mesh(const TriangleMesh& mesh, const SurfaceSamples& samples,
                                const AccessibilityReport& report, const std::filesystem::path& path) {
  if (report.inaccessible.size() != samples.size() || report.occlusion.size() != samples.size())
    throw LengthMismatch("report does not belong to this sample set");
  write_ply(mesh, path, label_face_colors(mesh, samples.sites, samples.site_triangle, report.inaccessible,
                                          report.occlusion));
}

}  // namespace millaccess
