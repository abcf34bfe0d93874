#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "millaccess/geometry.hpp"
#include "millaccess/mesh_io.hpp"

namespace millaccess {

struct SurfacePoint {
  Vec3 point;
  std::uint32_t triangle = 0;
  std::array<double, 3> bary{};
  double squared_distance = std::numeric_limits<double>::infinity();
};

/// Bounding volume hierarchy over mesh triangles for closest-point queries.
///
/// Ties between equidistant triangles resolve to whichever the fixed
/// traversal order meets first, so queries are deterministic.
class TriangleBvh {
 public:
  explicit TriangleBvh(TriangleMesh&&) = delete;  // keeps a pointer to the mesh
  explicit TriangleBvh(const TriangleMesh& mesh) : mesh_(&mesh) {
    const std::size_t n = mesh.triangle_count();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    boxes_.resize(n);
    centroids_.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      for (const Vec3& c : mesh.corners(t)) boxes_[t].expand(c);
      centroids_[t] = mesh.centroid(t);
    }
    if (n > 0) {
      nodes_.emplace_back();
      build(0, 0, static_cast<std::uint32_t>(n));
    }
  }

  SurfacePoint closest(const Vec3& p) const {
    SurfacePoint best;
    if (nodes_.empty()) return best;
    std::uint32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (node.box.squared_distance_to(p) > best.squared_distance) continue;
      if (node.count > 0) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          const std::uint32_t tri = order_[i];
          const auto c = mesh_->corners(tri);
          const TriangleProjection proj = closest_point_on_triangle(p, c[0], c[1], c[2]);
          const double d2 = squared_distance(p, proj.point);
          if (d2 < best.squared_distance) best = {proj.point, tri, proj.bary, d2};
        }
        continue;
      }
      const std::uint32_t left = node.first;
      const std::uint32_t right = left + 1;
      const double dl = nodes_[left].box.squared_distance_to(p);
      const double dr = nodes_[right].box.squared_distance_to(p);
      // Push the farther child first so the nearer one is visited next.
      if (dl <= dr) {
        stack[top++] = right;
        stack[top++] = left;
      } else {
        stack[top++] = left;
        stack[top++] = right;
      }
    }
    return best;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 4;

  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // first triangle (leaf) or left child index (inner)
    std::uint32_t count = 0;  // 0 for inner nodes
  };

  void build(std::uint32_t index, std::uint32_t begin, std::uint32_t end) {
    Aabb box;
    Aabb centre_box;
    for (std::uint32_t i = begin; i < end; ++i) {
      box.expand(boxes_[order_[i]].lo);
      box.expand(boxes_[order_[i]].hi);
      centre_box.expand(centroids_[order_[i]]);
    }
    nodes_[index].box = box;
    if (end - begin <= kLeafSize) {
      nodes_[index].first = begin;
      nodes_[index].count = end - begin;
      return;
    }
    const Vec3 ext = centre_box.extent();
    const int axis = (ext.x >= ext.y && ext.x >= ext.z) ? 0 : (ext.y >= ext.z ? 1 : 2);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = centroids_[a][axis];
                       const double cb = centroids_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    // Children are stored adjacently: left at L, right at L + 1.
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[index].first = left;
    nodes_[index].count = 0;
    build(left, begin, mid);
    build(left + 1, mid, end);
  }

  const TriangleMesh* mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Aabb> boxes_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

/// Uniform grid over a point set for exact nearest-neighbour queries.
/// Ties resolve to the smallest point index.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, const Aabb& domain) : points_(points.begin(), points.end()) {
    box_ = domain;
    for (const Vec3& p : points_) box_.expand(p);
    const Vec3 ext = box_.extent();
    const double longest = std::max({ext.x, ext.y, ext.z, 1e-9});
    const double target_cells = std::max<double>(1.0, static_cast<double>(points_.size()) / 2.0);
    double volume = 1.0;
    for (int a = 0; a < 3; ++a) volume *= std::max(ext[a], longest * 1e-3);
    cell_ = std::max(std::cbrt(volume / target_cells), longest * 1e-6);
    for (int a = 0; a < 3; ++a)
      dims_[a] = std::clamp(static_cast<int>(std::floor(ext[a] / cell_)) + 1, 1, 1024);
    const std::size_t cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    start_.assign(cells + 1, 0);
    std::vector<std::size_t> cell_of(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      cell_of[i] = flat(cell_coords(points_[i]));
      ++start_[cell_of[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(points_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i) items_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  struct Hit {
    std::uint32_t index = 0;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest point, optionally skipping one index. Empty grids return an
  /// infinite distance.
  Hit nearest(const Vec3& p, std::optional<std::uint32_t> exclude = std::nullopt) const {
    Hit best;
    if (points_.empty()) return best;
    const auto c = cell_coords(p);
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
      visit_shell(c, ring, [&](std::size_t cell) {
        for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
          const std::uint32_t idx = items_[k];
          if (exclude && *exclude == idx) continue;
          const double d2 = squared_distance(p, points_[idx]);
          if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) best = {idx, d2};
        }
      });
      const double bound = unexplored_bound(p, c, ring);
      if (best.squared_distance < bound * bound) break;
    }
    return best;
  }

 private:
  std::array<int, 3> cell_coords(const Vec3& p) const {
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a)
      c[a] = std::clamp(static_cast<int>(std::floor((p[a] - box_.lo[a]) / cell_)), 0, dims_[a] - 1);
    return c;
  }
  std::size_t flat(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0];
  }

  template <class Fn>
  void visit_shell(const std::array<int, 3>& c, int ring, Fn&& fn) const {
    const int x0 = std::max(0, c[0] - ring), x1 = std::min(dims_[0] - 1, c[0] + ring);
    const int y0 = std::max(0, c[1] - ring), y1 = std::min(dims_[1] - 1, c[1] + ring);
    const int z0 = std::max(0, c[2] - ring), z1 = std::min(dims_[2] - 1, c[2] + ring);
    for (int z = z0; z <= z1; ++z)
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const bool on_shell = std::abs(x - c[0]) == ring || std::abs(y - c[1]) == ring || std::abs(z - c[2]) == ring;
          if (on_shell) fn(flat({x, y, z}));
        }
  }

  // Lower bound on the distance from p to any cell outside the explored cube.
  double unexplored_bound(const Vec3& p, const std::array<int, 3>& c, int ring) const {
    double bound = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      if (c[a] - ring > 0) bound = std::min(bound, p[a] - (box_.lo[a] + (c[a] - ring) * cell_));
      if (c[a] + ring < dims_[a] - 1) bound = std::min(bound, box_.lo[a] + (c[a] + ring + 1) * cell_ - p[a]);
    }
    return std::max(bound, 0.0);
  }

  std::vector<Vec3> points_;
  Aabb box_;
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> items_;
};

/// Ray-parity point containment for closed meshes.
///
/// Casts an axis-aligned +X ray through a (y, z) bucket grid. If the ray
/// grazes an edge, vertex, or lies in a triangle's plane, the test is
/// repeated with fixed oblique directions against every triangle.
class ContainmentTester {
 public:
  explicit ContainmentTester(TriangleMesh&&) = delete;  // keeps a pointer to the mesh
  explicit ContainmentTester(const TriangleMesh& mesh) : mesh_(&mesh), box_(mesh.bounds()) {
    const Vec3 ext = box_.extent();
    scale_ = std::max({ext.x, ext.y, ext.z, 1e-300});
    const std::size_t n = mesh.triangle_count();
    const int side = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(n)) / 2.0), 1, 256);
    dims_ = {side, side};
    cell_ = {std::max(ext.y, 1e-12) / side, std::max(ext.z, 1e-12) / side};
    start_.assign(static_cast<std::size_t>(side) * side + 1, 0);
    std::vector<std::array<int, 4>> spans(n);
    for (std::size_t t = 0; t < n; ++t) {
      Aabb b;
      for (const Vec3& c : mesh.corners(t)) b.expand(c);
      spans[t] = {bucket(b.lo.y, 0), bucket(b.hi.y, 0), bucket(b.lo.z, 1), bucket(b.hi.z, 1)};
      for (int z = spans[t][2]; z <= spans[t][3]; ++z)
        for (int y = spans[t][0]; y <= spans[t][1]; ++y) ++start_[static_cast<std::size_t>(z) * side + y + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(start_.back());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t t = 0; t < n; ++t)
      for (int z = spans[t][2]; z <= spans[t][3]; ++z)
        for (int y = spans[t][0]; y <= spans[t][1]; ++y)
          items_[fill[static_cast<std::size_t>(z) * side + y]++] = static_cast<std::uint32_t>(t);
  }

  /// True for points strictly inside the closed surface or on it.
  bool inside_or_on(const Vec3& p) const {
    if (!box_.contains(p)) return false;
    const int y = bucket(p.y, 0);
    const int z = bucket(p.z, 1);
    const std::size_t cell = static_cast<std::size_t>(z) * dims_[0] + y;
    int crossings = 0;
    bool degenerate = false;
    const double tol = 1e-12 * scale_ * scale_;
    for (std::size_t k = start_[cell]; k < start_[cell + 1] && !degenerate; ++k) {
      const auto c = mesh_->corners(items_[k]);
      // Edge functions of (p.y, p.z) against the projected triangle.
      const double e0 = edge(c[1], c[2], p);
      const double e1 = edge(c[2], c[0], p);
      const double e2 = edge(c[0], c[1], p);
      const double area = e0 + e1 + e2;
      const bool all_pos = e0 > tol && e1 > tol && e2 > tol;
      const bool all_neg = e0 < -tol && e1 < -tol && e2 < -tol;
      if (all_pos || all_neg) {
        const double x = (e0 * c[0].x + e1 * c[1].x + e2 * c[2].x) / area;
        if (std::abs(x - p.x) <= 1e-12 * scale_) return true;
        if (x > p.x) ++crossings;
        continue;
      }
      const bool clear_miss = (e0 < -tol || e1 < -tol || e2 < -tol) && (e0 > tol || e1 > tol || e2 > tol);
      if (clear_miss) continue;
      // Grazing contact: only matters if the contact lies ahead of p.
      const double max_x = std::max({c[0].x, c[1].x, c[2].x});
      if (max_x >= p.x - 1e-12 * scale_) degenerate = true;
    }
    if (!degenerate) return (crossings & 1) != 0;
    return oblique_parity(p);
  }

 private:
  static double edge(const Vec3& a, const Vec3& b, const Vec3& p) {
    return (b.y - a.y) * (p.z - a.z) - (b.z - a.z) * (p.y - a.y);
  }

  int bucket(double v, int axis) const {
    const double lo = axis == 0 ? box_.lo.y : box_.lo.z;
    return std::clamp(static_cast<int>(std::floor((v - lo) / cell_[axis])), 0, dims_[axis] - 1);
  }

  bool oblique_parity(const Vec3& p) const {
    static constexpr std::array<Vec3, 4> kDirections{
        Vec3{0.5773502691896258, 0.5773502691896257, 0.5773502691896259},
        Vec3{0.2672612419124244, -0.5345224838248488, 0.8017837257372732},
        Vec3{-0.6666666666666666, 0.3333333333333333, 0.6666666666666667},
        Vec3{0.8017837257372732, 0.2672612419124244, -0.5345224838248488}};
    int first_parity = -1;
    for (const Vec3& dir : kDirections) {
      bool degenerate = false;
      int crossings = 0;
      for (std::size_t t = 0; t < mesh_->triangle_count(); ++t) {
        const auto c = mesh_->corners(t);
        const Vec3 e1 = c[1] - c[0];
        const Vec3 e2 = c[2] - c[0];
        const Vec3 pv = cross(dir, e2);
        const double det = dot(e1, pv);
        const Vec3 tv = p - c[0];
        if (std::abs(det) <= 1e-14 * norm(e1) * norm(e2)) {
          // Ray parallel to the plane: only a problem if p lies in it.
          if (std::abs(dot(tv, normalized(cross(e1, e2)))) <= 1e-12 * scale_) degenerate = true;
          continue;
        }
        const double u = dot(tv, pv) / det;
        const Vec3 qv = cross(tv, e1);
        const double v = dot(dir, qv) / det;
        const double t_hit = dot(e2, qv) / det;
        constexpr double eps = 1e-10;
        if (u < -eps || v < -eps || u + v > 1.0 + eps) continue;
        if (std::abs(t_hit) <= 1e-12 * scale_) return true;
        if (t_hit < 0) continue;
        if (u < eps || v < eps || u + v > 1.0 - eps) degenerate = true;
        ++crossings;
      }
      if (first_parity < 0) first_parity = crossings & 1;
      if (!degenerate) return (crossings & 1) != 0;
    }
    // Every direction grazed an edge; keep the first count.
    return first_parity == 1;
  }

  const TriangleMesh* mesh_;
  Aabb box_;
  double scale_ = 1.0;
  std::array<int, 2> dims_{1, 1};
  std::array<double, 2> cell_{1.0, 1.0};
  std::vector<std::size_t> start_;
  std::vector<std::uint32_t> items_;
};

}  // namespace millaccess
