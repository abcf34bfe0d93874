#pragma once

// Procedural test meshes and independent reference computations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "millaccess/accessibility.hpp"
#include "millaccess/cutter.hpp"
#include "millaccess/mesh_io.hpp"
#include "millaccess/sampling.hpp"

namespace fixtures {

using millaccess::Cutter;
using millaccess::Triangle;
using millaccess::TriangleMesh;
using millaccess::Vec3;

struct Builder {
  std::vector<Vec3> v;
  std::vector<Triangle> t;

  std::uint32_t add(const Vec3& p) {
    v.push_back(p);
    return static_cast<std::uint32_t>(v.size() - 1);
  }
  void tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) { t.push_back({a, b, c}); }
  void quad(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    tri(a, b, c);
    tri(a, c, d);
  }
  void append(const TriangleMesh& m) {
    const auto base = static_cast<std::uint32_t>(v.size());
    v.insert(v.end(), m.vertices().begin(), m.vertices().end());
    for (const Triangle& f : m.triangles()) t.push_back({f[0] + base, f[1] + base, f[2] + base});
  }
  TriangleMesh mesh() const { return TriangleMesh(v, t); }
};

inline TriangleMesh box(const Vec3& lo, const Vec3& hi) {
  Builder b;
  for (int k = 0; k < 8; ++k)
    b.add({(k & 1) ? hi.x : lo.x, (k & 2) ? hi.y : lo.y, (k & 4) ? hi.z : lo.z});
  b.quad(0, 2, 3, 1);  // z = lo
  b.quad(4, 5, 7, 6);  // z = hi
  b.quad(0, 1, 5, 4);  // y = lo
  b.quad(2, 6, 7, 3);  // y = hi
  b.quad(0, 4, 6, 2);  // x = lo
  b.quad(1, 3, 7, 5);  // x = hi
  return b.mesh();
}

inline TriangleMesh cube(double size = 1.0) { return box({0, 0, 0}, {size, size, size}); }

/// Cube with its top face removed.
inline TriangleMesh open_cube(double size = 1.0) {
  const TriangleMesh c = cube(size);
  std::vector<Triangle> keep;
  for (std::size_t f = 0; f < c.triangle_count(); ++f)
    if (c.centroid(f).z < size * 0.999) keep.push_back(c.triangles()[f]);
  return TriangleMesh(c.vertices(), keep);
}

inline TriangleMesh two_cubes() {
  Builder b;
  b.append(box({0, 0, 0}, {1, 1, 1}));
  b.append(box({3, 0, 0}, {4, 1, 1}));
  return b.mesh();
}

/// Outer box with an inverted inner box: a closed part with a sealed cavity.
inline TriangleMesh hollow_cube(double outer = 60.0, double wall = 15.0) {
  Builder b;
  b.append(box({0, 0, 0}, {outer, outer, outer}));
  const TriangleMesh inner = box({wall, wall, wall}, {outer - wall, outer - wall, outer - wall});
  const auto base = static_cast<std::uint32_t>(b.v.size());
  b.v.insert(b.v.end(), inner.vertices().begin(), inner.vertices().end());
  for (const Triangle& f : inner.triangles()) b.tri(f[0] + base, f[2] + base, f[1] + base);
  return b.mesh();
}

/// Flat square at z = 0, subdivided into cells x cells quads.
inline TriangleMesh plate(double size = 100.0, int cells = 1) {
  Builder b;
  for (int j = 0; j <= cells; ++j)
    for (int i = 0; i <= cells; ++i) b.add({size * i / cells, size * j / cells, 0.0});
  const auto id = [&](int i, int j) { return static_cast<std::uint32_t>(j * (cells + 1) + i); };
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < cells; ++i) b.quad(id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  return b.mesh();
}

/// Closed star-shaped surface r(theta, phi) around the origin (theta from +Z).
template <class RadiusFn>
TriangleMesh radial_surface(int rings, int segments, RadiusFn radius) {
  Builder b;
  const auto at = [&](double theta, double phi) {
    const double r = radius(theta, phi);
    return Vec3{r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi), r * std::cos(theta)};
  };
  const std::uint32_t north = b.add(at(0.0, 0.0));
  for (int k = 1; k < rings; ++k)
    for (int s = 0; s < segments; ++s)
      b.add(at(std::numbers::pi * k / rings, 2.0 * std::numbers::pi * s / segments));
  const std::uint32_t south = b.add(at(std::numbers::pi, 0.0));
  const auto id = [&](int k, int s) { return static_cast<std::uint32_t>(1 + (k - 1) * segments + (s % segments)); };
  for (int s = 0; s < segments; ++s) b.tri(north, id(1, s), id(1, s + 1));
  for (int k = 1; k + 1 < rings; ++k)
    for (int s = 0; s < segments; ++s) b.quad(id(k, s), id(k + 1, s), id(k + 1, s + 1), id(k, s + 1));
  for (int s = 0; s < segments; ++s) b.tri(south, id(rings - 1, s + 1), id(rings - 1, s));
  return b.mesh();
}

inline TriangleMesh sphere(double radius = 1.0, int rings = 24, int segments = 48) {
  return radial_surface(rings, segments, [radius](double, double) { return radius; });
}

/// Ear clipping for a simple counter-clockwise polygon.
inline std::vector<Triangle> triangulate(const std::vector<std::array<double, 2>>& poly) {
  std::vector<std::uint32_t> idx(poly.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto cross2 = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return (poly[b][0] - poly[a][0]) * (poly[c][1] - poly[a][1]) - (poly[b][1] - poly[a][1]) * (poly[c][0] - poly[a][0]);
  };
  std::vector<Triangle> out;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::uint32_t a = idx[(k + idx.size() - 1) % idx.size()], b = idx[k], c = idx[(k + 1) % idx.size()];
      if (cross2(a, b, c) <= 0) continue;
      bool empty = true;
      for (std::uint32_t p : idx) {
        if (p == a || p == b || p == c) continue;
        if (cross2(a, b, p) >= 0 && cross2(b, c, p) >= 0 && cross2(c, a, p) >= 0) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      out.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) throw std::runtime_error("ear clipping failed: polygon not simple or not CCW");
  }
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

/// Prism over a CCW polygon in the xy-plane, z in [0, height].
inline TriangleMesh extrude(const std::vector<std::array<double, 2>>& poly, double height) {
  Builder b;
  const auto n = static_cast<std::uint32_t>(poly.size());
  for (const auto& p : poly) b.add({p[0], p[1], 0.0});
  for (const auto& p : poly) b.add({p[0], p[1], height});
  for (const Triangle& f : triangulate(poly)) {
    b.tri(f[0] + n, f[1] + n, f[2] + n);
    b.tri(f[0], f[2], f[1]);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    b.quad(i, j, j + n, i + n);
  }
  return b.mesh();
}

/// Applies p -> A p + t, keeping faces outward for reflections.
inline TriangleMesh transform(const TriangleMesh& m, const millaccess::Mat3& a, const Vec3& t = {}) {
  std::vector<Vec3> v;
  for (const Vec3& p : m.vertices()) v.push_back(a * p + t);
  const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                     a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                     a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  std::vector<Triangle> f = m.triangles();
  if (det < 0)
    for (Triangle& tri : f) std::swap(tri[1], tri[2]);
  return TriangleMesh(v, f);
}

/// Rotates an xy-prism so the profile lies in the xz-plane (extrusion along +Y).
inline TriangleMesh stand_up(const TriangleMesh& prism) {
  millaccess::Mat3 a;
  a(1, 1) = 0;
  a(1, 2) = 1;
  a(2, 1) = 1;
  a(2, 2) = 0;
  return transform(prism, a);
}

/// Block with an open-top slot: profile is a U in the xz-plane.
inline TriangleMesh u_slot(double width = 60.0, double depth = 40.0, double height = 40.0, double slot = 20.0,
                           double floor = 10.0) {
  const double a = 0.5 * (width - slot);
  const std::vector<std::array<double, 2>> u{{0, 0},         {width, 0},     {width, height}, {a + slot, height},
                                             {a + slot, floor}, {a, floor},   {a, height},    {0, height}};
  return stand_up(extrude(u, depth));
}

/// Closed block whose top is the heightfield h(x, y) over [0, sx] x [0, sy].
template <class HeightFn>
TriangleMesh heightfield_block(double sx, double sy, int nx, int ny, HeightFn h) {
  Builder b;
  const auto top = [&](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
  const auto bottom = [&](int i, int j) { return static_cast<std::uint32_t>((nx + 1) * (ny + 1) + j * (nx + 1) + i); };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double x = sx * i / nx, y = sy * j / ny;
      b.add({x, y, h(x, y)});
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) b.add({sx * i / nx, sy * j / ny, 0.0});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      b.quad(top(i, j), top(i + 1, j), top(i + 1, j + 1), top(i, j + 1));
      b.quad(bottom(i, j), bottom(i, j + 1), bottom(i + 1, j + 1), bottom(i + 1, j));
    }
  // Boundary walked counter-clockwise from above.
  std::vector<std::pair<int, int>> loop;
  for (int i = 0; i < nx; ++i) loop.push_back({i, 0});
  for (int j = 0; j < ny; ++j) loop.push_back({nx, j});
  for (int i = nx; i > 0; --i) loop.push_back({i, ny});
  for (int j = ny; j > 0; --j) loop.push_back({0, j});
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto [pi, pj] = loop[k];
    const auto [qi, qj] = loop[(k + 1) % loop.size()];
    b.quad(bottom(pi, pj), bottom(qi, qj), top(qi, qj), top(pi, pj));
  }
  return b.mesh();
}

/// 100 x 80 block, 30 tall, with one rectangular pocket 15 deep.
inline TriangleMesh pocketed_block(int nx = 40, int ny = 32) {
  return heightfield_block(100.0, 80.0, nx, ny, [](double x, double y) {
    return (x > 30 && x < 70 && y > 25 && y < 55) ? 15.0 : 30.0;
  });
}

/// Square pyramid: base 60 x 60 at z = 0, apex at height 45.
inline TriangleMesh pyramid(double base = 60.0, double height = 45.0) {
  Builder b;
  b.add({0, 0, 0});
  b.add({base, 0, 0});
  b.add({base, base, 0});
  b.add({0, base, 0});
  const std::uint32_t apex = b.add({0.5 * base, 0.5 * base, height});
  b.quad(0, 3, 2, 1);
  b.tri(0, 1, apex);
  b.tri(1, 2, apex);
  b.tri(2, 3, apex);
  b.tri(3, 0, apex);
  return b.mesh();
}

/// Machined-part stand-in: stepped block with pockets, a slot and a boss.
inline TriangleMesh cad_block() {
  return heightfield_block(160.0, 120.0, 96, 72, [](double x, double y) {
    double z = 50.0;
    if (x > 15 && x < 60 && y > 15 && y < 55) z = 20.0;                // deep pocket
    if (x > 80 && x < 145 && y > 20 && y < 40) z = 35.0;               // slot
    if (x > 90 && x < 140 && y > 60 && y < 105) z = 30.0;              // shallow pocket
    if ((x - 115) * (x - 115) + (y - 82) * (y - 82) < 100) z = 45.0;   // boss inside it
    if (x < 10) z = 40.0;                                              // step
    return z;
  });
}

/// Fifteen seeded shapes: bumpy heightfields, random star prisms and blobs.
inline std::vector<TriangleMesh> random_shapes(std::uint64_t seed = 2024) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TriangleMesh> out;
  for (int s = 0; s < 5; ++s) {
    const double base = 20 + 20 * u(rng), amp = 5 + 15 * u(rng);
    const double fx = 1 + 3 * u(rng), fy = 1 + 3 * u(rng), ph = 6.28 * u(rng);
    const double sx = 60 + 60 * u(rng), sy = 60 + 60 * u(rng);
    out.push_back(heightfield_block(sx, sy, 30, 30, [=](double x, double y) {
      return base + amp * std::sin(fx * x / sx * 6.28 + ph) * std::cos(fy * y / sy * 6.28);
    }));
  }
  for (int s = 0; s < 5; ++s) {
    const int points = 5 + static_cast<int>(6 * u(rng));
    const double outer = 30 + 30 * u(rng), inner = outer * (0.3 + 0.4 * u(rng)), h = 20 + 40 * u(rng);
    std::vector<std::array<double, 2>> poly;
    for (int k = 0; k < 2 * points; ++k) {
      const double a = std::numbers::pi * k / points;
      const double r = (k % 2 == 0 ? outer : inner) * (0.85 + 0.3 * u(rng));
      poly.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const TriangleMesh prism = extrude(poly, h);
    out.push_back(s % 2 == 0 ? prism : stand_up(prism));
  }
  for (int s = 0; s < 5; ++s) {
    const double r0 = 30 + 20 * u(rng), a1 = 0.1 + 0.25 * u(rng), a2 = 0.1 + 0.2 * u(rng);
    const int l1 = 2 + static_cast<int>(4 * u(rng)), l2 = 2 + static_cast<int>(4 * u(rng));
    const double ph = 6.28 * u(rng);
    out.push_back(radial_surface(20, 40, [=](double theta, double phi) {
      return r0 * (1 + a1 * std::cos(l1 * phi + ph) * std::sin(theta) + a2 * std::cos(l2 * theta));
    }));
  }
  return out;
}

struct NamedMesh {
  std::string name;
  TriangleMesh mesh;
};

/// Cube, plate, sphere, U-slot, pocketed block and fifteen random shapes, all
/// scaled so the shortest bbox edge is at least 80 mm (the plate stays flat).
inline std::vector<NamedMesh> corpus() {
  std::vector<NamedMesh> out{{"cube", millaccess::normalize_scale(cube(1.0))},
                             {"plate", plate(100.0)},
                             {"sphere", millaccess::normalize_scale(sphere(1.0, 16, 32))},
                             {"u_slot", millaccess::normalize_scale(u_slot())},
                             {"pocketed_block", millaccess::normalize_scale(pocketed_block())}};
  const std::vector<TriangleMesh> random = random_shapes();
  for (std::size_t k = 0; k < random.size(); ++k)
    out.push_back({"random_" + std::to_string(k), millaccess::normalize_scale(random[k])});
  return out;
}

inline double signed_volume(const TriangleMesh& m) {
  double v = 0;
  for (std::size_t f = 0; f < m.triangle_count(); ++f) {
    const auto c = m.corners(f);
    v += millaccess::dot(c[0], millaccess::cross(c[1], c[2]));
  }
  return v / 6.0;
}

/// Generalized winding number (sum of signed solid angles / 4 pi).
inline double winding_number(const TriangleMesh& m, const Vec3& p) {
  double total = 0;
  for (std::size_t f = 0; f < m.triangle_count(); ++f) {
    const auto c = m.corners(f);
    const Vec3 a = c[0] - p, b = c[1] - p, d = c[2] - p;
    const double la = millaccess::norm(a), lb = millaccess::norm(b), ld = millaccess::norm(d);
    const double num = millaccess::dot(a, millaccess::cross(b, d));
    const double den = la * lb * ld + millaccess::dot(a, b) * ld + millaccess::dot(a, d) * lb + millaccess::dot(b, d) * la;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

inline bool winding_inside(const TriangleMesh& m, const Vec3& p) { return winding_number(m, p) > 0.5; }

/// Reference labels computed with nested loops and the if-chain classifier.
struct OracleLabels {
  std::vector<std::uint8_t> inaccessible;
  std::vector<std::uint64_t> beta;
  std::uint64_t triples = 0;  // (inaccessible contact, direction, collider)
};

inline OracleLabels oracle_labels(const std::vector<Vec3>& contacts, const std::vector<Vec3>& obstacles, bool shared,
                                  const millaccess::DirectionSet& dirs, const Cutter& cutter) {
  const millaccess::CutterClassifier cls(cutter);
  const std::size_t n = contacts.size(), m = dirs.size();
  std::vector<std::vector<Vec3>> qc(m), qo(m);
  for (std::size_t k = 0; k < m; ++k) {
    const millaccess::Mat3 r = millaccess::rotation_to_z(dirs.directions[k]);
    for (const Vec3& p : contacts) qc[k].push_back(r * p);
    for (const Vec3& p : obstacles) qo[k].push_back(r * p);
  }
  const auto hits = [&](std::size_t k, std::size_t i, std::size_t j) {
    if (shared && i == j) return false;
    const Vec3 q = qo[k][j] - qc[k][i];
    return cls.classify(q) != millaccess::CutterRegion::none;
  };
  OracleLabels out;
  out.inaccessible.assign(n, 0);
  out.beta.assign(obstacles.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    bool blocked_everywhere = true;
    for (std::size_t k = 0; k < m && blocked_everywhere; ++k) {
      bool any = false;
      for (std::size_t j = 0; j < obstacles.size() && !any; ++j) any = hits(k, i, j);
      blocked_everywhere = any;
    }
    if (!blocked_everywhere) continue;
    out.inaccessible[i] = 1;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < obstacles.size(); ++j)
        if (hits(k, i, j)) {
          ++out.beta[j];
          ++out.triples;
        }
  }
  return out;
}

inline Cutter oracle_effective(Cutter c, const millaccess::AccessibilityOptions& o) {
  return millaccess::detail::effective_cutter(c, o);
}

inline std::vector<Vec3> mirror_x(const std::vector<Vec3>& pts) {
  std::vector<Vec3> out;
  for (const Vec3& p : pts) out.push_back({-p.x, p.y, p.z});
  return out;
}

/// Sites on the top face of a 100 x 100 plate on a regular grid.
inline std::vector<Vec3> plate_sites(int per_side = 20, double size = 100.0) {
  std::vector<Vec3> out;
  for (int j = 0; j < per_side; ++j)
    for (int i = 0; i < per_side; ++i) out.push_back({size * (i + 0.5) / per_side, size * (j + 0.5) / per_side, 0.0});
  return out;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("millaccess_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
