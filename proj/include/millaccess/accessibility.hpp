#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "millaccess/cutter.hpp"
#include "millaccess/errors.hpp"
#include "millaccess/geometry.hpp"
#include "millaccess/parallel.hpp"
#include "millaccess/sampling.hpp"

namespace millaccess {

enum class ShaftMode { fr_plus_sigma, infinite };

inline std::string_view to_string(ShaftMode m) { return m == ShaftMode::infinite ? "infinite" : "fr_plus_sigma"; }

inline ShaftMode shaft_mode_from_name(std::string_view name) {
  if (name == "fr_plus_sigma") return ShaftMode::fr_plus_sigma;
  if (name == "infinite") return ShaftMode::infinite;
  throw InvalidArgument("unknown shaft mode '" + std::string(name) + "'");
}

struct AccessibilityOptions {
  double sigma = kDefaultSigma;      // detection-cylinder margin beyond FR, mm
  double occlusion_fraction = 0.10;  // share of sites labelled as occluders
  double epsilon = kContactTolerance;
  bool prefilter = true;
  ShaftMode shaft_mode = ShaftMode::fr_plus_sigma;
  unsigned threads = 1;  // 0 = hardware concurrency; results do not depend on it

  void check() const {
    if (!(sigma >= 0)) throw InvalidArgument("sigma must be non-negative");
    if (!(occlusion_fraction > 0 && occlusion_fraction <= 1))
      throw InvalidArgument("occlusion fraction must be in (0, 1]");
    if (!(epsilon >= 0)) throw InvalidArgument("epsilon must be non-negative");
  }
};

struct ReportMeta {
  Cutter cutter;  // with the shaft radius actually used
  std::size_t direction_count = 0;
  std::size_t contact_count = 0;
  std::size_t obstacle_count = 0;
  AccessibilityOptions options;
  bool brute_force = false;
  double label_seconds = 0.0;
  double occlusion_seconds = 0.0;
};

/// Per-contact inaccessibility and per-obstacle occlusion results.
///
/// For surface analysis contacts and obstacles are the same sites. For
/// volume analysis contacts are grid points and obstacles are surface sites.
struct AccessibilityReport {
  std::vector<std::uint8_t> inaccessible;                       // per contact
  std::vector<std::optional<std::uint32_t>> accessible_direction;  // per contact
  std::vector<std::uint64_t> beta;                              // per obstacle
  std::vector<std::uint8_t> occlusion;                          // per obstacle
  ReportMeta meta;

  std::size_t inaccessible_count() const {
    return static_cast<std::size_t>(std::count(inaccessible.begin(), inaccessible.end(), 1));
  }
  std::size_t occlusion_count() const {
    return static_cast<std::size_t>(std::count(occlusion.begin(), occlusion.end(), 1));
  }

  /// Label and beta equality, ignoring timing metadata.
  bool same_labels(const AccessibilityReport& o) const {
    return inaccessible == o.inaccessible && accessible_direction == o.accessible_direction && beta == o.beta &&
           occlusion == o.occlusion;
  }
};

/// Minimal rotation taking unit d onto +Z (Rodrigues about d x z).
inline Mat3 rotation_to_z(const Vec3& d) {
  if (std::abs(d.x) <= 1e-12 && std::abs(d.y) <= 1e-12) {
    if (d.z > 0) return Mat3::identity();
    Mat3 flip;  // 180 degrees about X
    flip(1, 1) = -1.0;
    flip(2, 2) = -1.0;
    return flip;
  }
  const Vec3 v = cross(d, Vec3{0, 0, 1});  // (d.y, -d.x, 0)
  const double c = d.z;
  const double k = 1.0 / (1.0 + c);
  Mat3 r;
  r(0, 0) = 1.0 - (v.y * v.y) * k;
  r(0, 1) = (v.x * v.y) * k;
  r(0, 2) = v.y;
  r(1, 0) = (v.x * v.y) * k;
  r(1, 1) = 1.0 - (v.x * v.x) * k;
  r(1, 2) = -v.x;
  r(2, 0) = -v.y;
  r(2, 1) = v.x;
  r(2, 2) = 1.0 - (v.x * v.x + v.y * v.y) * k;
  return r;
}

/// Marks the first min(ceil(fraction * n), #{beta > 0}) sites in
/// (beta descending, index ascending) order.
inline std::vector<std::uint8_t> select_occlusion(std::span<const std::uint64_t> beta, double fraction) {
  const std::size_t n = beta.size();
  std::vector<std::uint8_t> labels(n, 0);
  const auto quota = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < n; ++i)
    if (beta[i] > 0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return beta[a] > beta[b]; });
  const std::size_t take = std::min(quota, order.size());
  for (std::size_t k = 0; k < take; ++k) labels[order[k]] = 1;
  return labels;
}

namespace detail {

/// Structure-of-arrays point coordinates.
struct Coords {
  std::vector<double> x, y, z;
  void resize(std::size_t n) {
    x.resize(n);
    y.resize(n);
    z.resize(n);
  }
  std::size_t size() const { return x.size(); }
};

/// Contact and obstacle coordinates rotated into each direction's frame.
///
/// The cutter-local position of obstacle j seen from contact i is
/// q_obstacle[j] - q_contact[i]; both engines use exactly this arithmetic.
struct RotatedFrames {
  std::vector<Coords> contacts;
  std::vector<Coords> obstacles;
  bool shared = false;  // contacts and obstacles are the same point set

  RotatedFrames(std::span<const Vec3> contact_pts, std::span<const Vec3> obstacle_pts, bool same_set,
                const DirectionSet& dirs, unsigned threads)
      : shared(same_set) {
    const std::size_t m = dirs.size();
    obstacles.resize(m);
    if (!shared) contacts.resize(m);
    parallel_for(m, threads, [&](std::size_t k) {
      const Mat3 r = rotation_to_z(dirs.directions[k]);
      const auto fill = [&](Coords& out, std::span<const Vec3> pts) {
        out.resize(pts.size());
        for (std::size_t j = 0; j < pts.size(); ++j) {
          const Vec3 q = r * pts[j];
          out.x[j] = q.x;
          out.y[j] = q.y;
          out.z[j] = q.z;
        }
      };
      fill(obstacles[k], obstacle_pts);
      if (!shared) fill(contacts[k], contact_pts);
    });
  }

  const Coords& contact(std::size_t k) const { return shared ? obstacles[k] : contacts[k]; }
  const Coords& obstacle(std::size_t k) const { return obstacles[k]; }
};

/// Branch-free collision predicate equivalent to CutterClassifier::classify != none.
struct CollisionTest {
  double ball_radius, ball_top, body_top, holder_top;
  double ball_sq, body_sq, holder_sq, shaft_sq;

  explicit CollisionTest(const CutterClassifier& c)
      : ball_radius(c.ball_radius),
        ball_top(c.ball_top),
        body_top(c.body_top),
        holder_top(c.holder_top),
        ball_sq(c.ball_limit_sq),
        body_sq(c.body_limit_sq),
        holder_sq(c.holder_limit_sq),
        shaft_sq(c.shaft_limit_sq) {}

  bool operator()(double r2, double z) const {
    const double dz = z - ball_radius;
    const double ball_d = r2 + dz * dz;
    const bool shaft = (z > holder_top) & (r2 < shaft_sq);
    const bool holder = (z <= holder_top) & (z >= body_top) & (r2 < holder_sq);
    const bool body = (z < body_top) & (z >= ball_top) & (r2 < body_sq);
    const bool ball = (z < ball_top) & (z >= 0.0) & (ball_d < ball_sq);
    return shaft | holder | body | ball;
  }
};

inline Cutter effective_cutter(const Cutter& cutter, const AccessibilityOptions& opt) {
  Cutter c = cutter;
  c.shaft_radius = opt.shaft_mode == ShaftMode::infinite ? std::numeric_limits<double>::infinity()
                                                        : cutter.holder_radius + opt.sigma;
  if (!c.valid()) throw InvalidArgument("invalid cutter for analysis");
  return c;
}

/// 2D bucket grid over one direction's rotated (x, y) obstacle coordinates.
/// Cells are at least as wide as the detection radius, so all obstacles
/// within that radius of a query lie in its 3x3 cell block.
class ColumnGrid {
 public:
  ColumnGrid() = default;
  ColumnGrid(const Coords& pts, double radius) {
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      lo_x = std::min(lo_x, pts.x[j]);
      hi_x = std::max(hi_x, pts.x[j]);
      lo_y = std::min(lo_y, pts.y[j]);
      hi_y = std::max(hi_y, pts.y[j]);
    }
    if (pts.size() == 0) lo_x = hi_x = lo_y = hi_y = 0.0;
    constexpr int kMaxDim = 1024;
    const double span = std::max(hi_x - lo_x, hi_y - lo_y);
    cell_ = std::max({radius * (1.0 + 1e-9) + 1e-9, span / (kMaxDim - 2), 1e-9});
    lo_x_ = lo_x;
    lo_y_ = lo_y;
    nx_ = std::clamp(static_cast<int>((hi_x - lo_x) / cell_) + 1, 1, kMaxDim);
    ny_ = std::clamp(static_cast<int>((hi_y - lo_y) / cell_) + 1, 1, kMaxDim);
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<std::uint32_t> cell_of(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      cell_of[j] = static_cast<std::uint32_t>(flat(cx(pts.x[j]), cy(pts.y[j])));
      ++start_[cell_of[j] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    index_.resize(pts.size());
    local_.resize(pts.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t j = 0; j < pts.size(); ++j) index_[fill[cell_of[j]]++] = static_cast<std::uint32_t>(j);
    // z ascending within a cell, so scans can start at a height floor.
    for (std::size_t c = 0; c + 1 < start_.size(); ++c)
      std::stable_sort(index_.begin() + start_[c], index_.begin() + start_[c + 1],
                       [&](std::uint32_t a, std::uint32_t b) { return pts.z[a] < pts.z[b]; });
    for (std::size_t s = 0; s < index_.size(); ++s) {
      const std::uint32_t j = index_[s];
      local_.x[s] = pts.x[j];
      local_.y[s] = pts.y[j];
      local_.z[s] = pts.z[j];
    }
  }

  /// Visits candidate slots near (x, y), centre cell first. The visitor
  /// returns true to stop early; visit returns whether it was stopped.
  /// Slots whose z - floor_z is negative are skipped.
  template <class Fn>
  bool visit(double x, double y, double floor_z, Fn&& fn) const {
    const int ix = cx(x), iy = cy(y);
    if (scan_cell(ix, iy, floor_z, fn)) return true;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int gx = ix + dx, gy = iy + dy;
        if (gx < 0 || gy < 0 || gx >= nx_ || gy >= ny_) continue;
        if (scan_cell(gx, gy, floor_z, fn)) return true;
      }
    return false;
  }

  /// Calls fn(first, last) for each slot range of the 3x3 block around
  /// (x, y), with slots below floor_z already cut off.
  template <class Fn>
  void for_ranges(double x, double y, double floor_z, Fn&& fn) const {
    const int ix = cx(x), iy = cy(y);
    for (int gy = std::max(iy - 1, 0); gy <= std::min(iy + 1, ny_ - 1); ++gy)
      for (int gx = std::max(ix - 1, 0); gx <= std::min(ix + 1, nx_ - 1); ++gx) {
        const std::size_t c = flat(gx, gy);
        fn(lower(c, floor_z), start_[c + 1]);
      }
  }

  const Coords& slots() const { return local_; }
  std::uint32_t obstacle_of(std::size_t slot) const { return index_[slot]; }
  const std::vector<std::uint32_t>& owners() const { return index_; }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>(std::floor((x - lo_x_) / cell_)), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>(std::floor((y - lo_y_) / cell_)), 0, ny_ - 1); }
  std::size_t flat(int x, int y) const { return static_cast<std::size_t>(y) * nx_ + x; }

  std::uint32_t lower(std::size_t c, double floor_z) const {
    const double* z = local_.z.data();
    return static_cast<std::uint32_t>(
        std::partition_point(z + start_[c], z + start_[c + 1], [&](double v) { return v - floor_z < 0.0; }) - z);
  }

  template <class Fn>
  bool scan_cell(int x, int y, double floor_z, Fn& fn) const {
    const std::size_t c = flat(x, y);
    for (std::uint32_t s = lower(c, floor_z); s < start_[c + 1]; ++s)
      if (fn(s)) return true;
    return false;
  }

  double cell_ = 1.0, lo_x_ = 0.0, lo_y_ = 0.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> index_;
  Coords local_;
};

constexpr std::uint32_t kNoExclusion = std::numeric_limits<std::uint32_t>::max();

struct EngineInput {
  std::span<const Vec3> contacts;
  std::span<const Vec3> obstacles;
  bool shared = false;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Reference engine: every obstacle against every (contact, direction) pair.
inline AccessibilityReport run_brute(const EngineInput& in, const DirectionSet& dirs, const Cutter& cutter_in,
                                     const AccessibilityOptions& opt) {
  const Cutter cutter = effective_cutter(cutter_in, opt);
  const CollisionTest collides(CutterClassifier(cutter, opt.epsilon));
  const std::size_t nc = in.contacts.size();
  const std::size_t no = in.obstacles.size();
  const std::size_t m = dirs.size();

  AccessibilityReport rep;
  rep.meta = {cutter, m, nc, no, opt, true, 0.0, 0.0};
  rep.inaccessible.assign(nc, 0);
  rep.accessible_direction.assign(nc, std::nullopt);

  auto t0 = std::chrono::steady_clock::now();
  const RotatedFrames frames(in.contacts, in.obstacles, in.shared, dirs, opt.threads);
  parallel_for(nc, opt.threads, [&](std::size_t i) {
    const std::uint32_t self = in.shared ? static_cast<std::uint32_t>(i) : kNoExclusion;
    std::optional<std::uint32_t> first_free;
    for (std::size_t k = 0; k < m; ++k) {
      const Coords& ob = frames.obstacle(k);
      const Coords& ct = frames.contact(k);
      const double px = ct.x[i], py = ct.y[i], pz = ct.z[i];
      std::size_t hits = 0;
      for (std::size_t j = 0; j < no; ++j) {
        const double lx = ob.x[j] - px;
        const double ly = ob.y[j] - py;
        const double lz = ob.z[j] - pz;
        hits += (collides(lx * lx + ly * ly, lz) & (j != self)) ? 1u : 0u;
      }
      if (hits == 0 && !first_free) first_free = static_cast<std::uint32_t>(k);
    }
    rep.accessible_direction[i] = first_free;
    rep.inaccessible[i] = first_free ? 0 : 1;
  });
  rep.meta.label_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<std::uint64_t>> partial;
  std::vector<std::uint32_t> blocked;
  for (std::uint32_t i = 0; i < nc; ++i)
    if (rep.inaccessible[i]) blocked.push_back(i);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(opt.threads), std::max<std::size_t>(blocked.size(), 1)));
  partial.assign(workers, std::vector<std::uint64_t>(no, 0));
  parallel_chunks(blocked.size(), workers, [&](std::size_t b0, std::size_t b1, unsigned w) {
    auto& beta = partial[w];
    for (std::size_t b = b0; b < b1; ++b) {
      const std::uint32_t i = blocked[b];
      const std::uint32_t self = in.shared ? i : kNoExclusion;
      for (std::size_t k = 0; k < m; ++k) {
        const Coords& ob = frames.obstacle(k);
        const Coords& ct = frames.contact(k);
        const double px = ct.x[i], py = ct.y[i], pz = ct.z[i];
        for (std::size_t j = 0; j < no; ++j) {
          const double lx = ob.x[j] - px;
          const double ly = ob.y[j] - py;
          const double lz = ob.z[j] - pz;
          beta[j] += (collides(lx * lx + ly * ly, lz) & (j != self)) ? 1u : 0u;
        }
      }
    }
  });
  rep.beta.assign(no, 0);
  for (const auto& p : partial)
    for (std::size_t j = 0; j < no; ++j) rep.beta[j] += p[j];
  rep.occlusion = select_occlusion(rep.beta, opt.occlusion_fraction);
  rep.meta.occlusion_seconds = seconds_since(t0);
  return rep;
}

/// Per-direction data for the culled engine.
struct DirectionIndex {
  ColumnGrid grid;
  // Two highest rotated z values (and owners), for the unbounded-shaft test.
  double top_z[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::uint32_t top_idx[2] = {kNoExclusion, kNoExclusion};
  std::vector<std::uint32_t> by_height;  // obstacle indices, z descending (unbounded shaft only)
};

/// Culled engine: detection-cylinder grid, early exit per direction and
/// per contact, and a collider hint carried across directions.
inline AccessibilityReport run_culled(const EngineInput& in, const DirectionSet& dirs, const Cutter& cutter_in,
                                      const AccessibilityOptions& opt) {
  const Cutter cutter = effective_cutter(cutter_in, opt);
  const CollisionTest collides(CutterClassifier(cutter, opt.epsilon));
  const bool unbounded = opt.shaft_mode == ShaftMode::infinite;
  const double holder_top = cutter.total_height();
  const std::size_t nc = in.contacts.size();
  const std::size_t no = in.obstacles.size();
  const std::size_t m = dirs.size();

  // Beyond this horizontal distance nothing collides, except points above
  // the holder when the shaft is unbounded. With a finite shaft this is the
  // FR + sigma detection cylinder.
  const double detect_radius = unbounded ? std::max(cutter.ball_radius, cutter.holder_radius)
                                         : std::max({cutter.ball_radius, cutter.holder_radius, cutter.shaft_radius});
  const bool use_grid = opt.prefilter;

  AccessibilityReport rep;
  rep.meta = {cutter, m, nc, no, opt, false, 0.0, 0.0};
  rep.inaccessible.assign(nc, 0);
  rep.accessible_direction.assign(nc, std::nullopt);

  auto t0 = std::chrono::steady_clock::now();
  const RotatedFrames frames(in.contacts, in.obstacles, in.shared, dirs, opt.threads);
  std::vector<DirectionIndex> index(m);
  parallel_for(m, opt.threads, [&](std::size_t k) {
    const Coords& ob = frames.obstacle(k);
    DirectionIndex& di = index[k];
    if (use_grid) di.grid = ColumnGrid(ob, detect_radius);
    if (unbounded) {
      for (std::uint32_t j = 0; j < no; ++j) {
        const double z = ob.z[j];
        if (z > di.top_z[0]) {
          di.top_z[1] = di.top_z[0];
          di.top_idx[1] = di.top_idx[0];
          di.top_z[0] = z;
          di.top_idx[0] = j;
        } else if (z > di.top_z[1]) {
          di.top_z[1] = z;
          di.top_idx[1] = j;
        }
      }
      di.by_height.resize(no);
      std::iota(di.by_height.begin(), di.by_height.end(), 0u);
      std::stable_sort(di.by_height.begin(), di.by_height.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return ob.z[a] > ob.z[b]; });
    }
  });

  // Does any obstacle collide with the cutter at contact i in direction k?
  const auto blocked_in = [&](std::uint32_t i, std::size_t k, std::uint32_t& hint) {
    const Coords& ob = frames.obstacle(k);
    const Coords& ct = frames.contact(k);
    const std::uint32_t self = in.shared ? i : kNoExclusion;
    const double px = ct.x[i], py = ct.y[i], pz = ct.z[i];
    if (unbounded) {
      const DirectionIndex& di = index[k];
      const double top = di.top_idx[0] != self ? di.top_z[0] : di.top_z[1];
      if (top - pz > holder_top) return true;
    }
    const auto test = [&](double x, double y, double z) {
      const double lx = x - px, ly = y - py, lz = z - pz;
      return collides(lx * lx + ly * ly, lz);
    };
    if (hint != kNoExclusion && hint != self && test(ob.x[hint], ob.y[hint], ob.z[hint])) return true;
    if (use_grid) {
      const ColumnGrid& g = index[k].grid;
      const Coords& s = g.slots();
      return g.visit(px, py, pz, [&](std::uint32_t slot) {
        const std::uint32_t j = g.obstacle_of(slot);
        if (j == self || !test(s.x[slot], s.y[slot], s.z[slot])) return false;
        hint = j;
        return true;
      });
    }
    for (std::uint32_t j = 0; j < no; ++j) {
      if (j != self && test(ob.x[j], ob.y[j], ob.z[j])) {
        hint = j;
        return true;
      }
    }
    return false;
  };

  parallel_for(nc, opt.threads, [&](std::size_t ci) {
    const auto i = static_cast<std::uint32_t>(ci);
    std::uint32_t hint = kNoExclusion;
    for (std::size_t k = 0; k < m; ++k) {
      if (!blocked_in(i, k, hint)) {
        rep.accessible_direction[i] = static_cast<std::uint32_t>(k);
        return;
      }
    }
    rep.inaccessible[i] = 1;
  });
  rep.meta.label_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<std::uint32_t> blocked;
  for (std::uint32_t i = 0; i < nc; ++i)
    if (rep.inaccessible[i]) blocked.push_back(i);
  // Directions outer: each direction counts into a per-slot buffer with a
  // branch-free loop, then folds it into the obstacle counts.
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(opt.threads), std::max<std::size_t>(m, 1)));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(no, 0));
  if (!blocked.empty()) parallel_chunks(m, workers, [&](std::size_t k0, std::size_t k1, unsigned w) {
    auto& beta = partial[w];
    std::vector<std::uint32_t> count(no);
    for (std::size_t k = k0; k < k1; ++k) {
      const Coords& ob = frames.obstacle(k);
      const Coords& ct = frames.contact(k);
      std::fill(count.begin(), count.end(), 0u);
      if (!use_grid) {
        for (const std::uint32_t i : blocked) {
          const std::uint32_t self = in.shared ? i : kNoExclusion;
          const double px = ct.x[i], py = ct.y[i], pz = ct.z[i];
          for (std::uint32_t j = 0; j < no; ++j) {
            const double lx = ob.x[j] - px, ly = ob.y[j] - py, lz = ob.z[j] - pz;
            count[j] += (collides(lx * lx + ly * ly, lz) & (j != self)) ? 1u : 0u;
          }
        }
        for (std::uint32_t j = 0; j < no; ++j) beta[j] += count[j];
        continue;
      }
      const ColumnGrid& g = index[k].grid;
      const double* sx = g.slots().x.data();
      const double* sy = g.slots().y.data();
      const double* sz = g.slots().z.data();
      const std::uint32_t* owner = g.owners().data();
      std::uint32_t* cnt = count.data();
      for (const std::uint32_t i : blocked) {
        const std::uint32_t self = in.shared ? i : kNoExclusion;
        const double px = ct.x[i], py = ct.y[i], pz = ct.z[i];
        if (unbounded) {
          // Everything above the holder collides; the grid counts the rest.
          for (std::uint32_t j : index[k].by_height) {
            if (!(ob.z[j] - pz > holder_top)) break;
            if (j != self) ++beta[j];
          }
        }
        g.for_ranges(px, py, pz, [&](std::uint32_t first, std::uint32_t last) {
          for (std::uint32_t t = first; t < last; ++t) {
            const double lx = sx[t] - px, ly = sy[t] - py, lz = sz[t] - pz;
            const bool above = unbounded & (lz > holder_top);
            cnt[t] += (collides(lx * lx + ly * ly, lz) & (owner[t] != self) & !above) ? 1u : 0u;
          }
        });
      }
      for (std::uint32_t t = 0; t < no; ++t) beta[owner[t]] += cnt[t];
    }
  });
  rep.beta.assign(no, 0);
  for (const auto& p : partial)
    for (std::size_t j = 0; j < no; ++j) rep.beta[j] += p[j];
  rep.occlusion = select_occlusion(rep.beta, opt.occlusion_fraction);
  rep.meta.occlusion_seconds = seconds_since(t0);
  return rep;
}

}  // namespace detail

/// Surface accessibility: each site is a contact point and every other
/// site an obstacle. A site is inaccessible when the cutter collides with
/// some other site in every direction.
inline AccessibilityReport analyze(const SurfaceSamples& samples, const DirectionSet& directions, const Cutter& cutter,
                                   const AccessibilityOptions& options = {}) {
  options.check();
  if (samples.empty() || directions.empty()) throw EmptyInput("analysis needs at least one site and one direction");
  return detail::run_culled({samples.sites, samples.sites, true}, directions, cutter, options);
}

/// Exhaustive O(m n^2) reference with no culling and no early exit.
inline AccessibilityReport brute_force_analyze(const SurfaceSamples& samples, const DirectionSet& directions,
                                               const Cutter& cutter, const AccessibilityOptions& options = {}) {
  options.check();
  if (samples.empty() || directions.empty()) throw EmptyInput("analysis needs at least one site and one direction");
  return detail::run_brute({samples.sites, samples.sites, true}, directions, cutter, options);
}

/// Volume accessibility: stock grid points are contacts, the part's
/// surface sites are the only obstacles. Beta accumulates on the sites.
inline AccessibilityReport analyze_volume(const VolumeSamples& volume, const SurfaceSamples& obstacles,
                                          const DirectionSet& directions, const Cutter& cutter,
                                          const AccessibilityOptions& options = {}) {
  options.check();
  if (volume.empty() || directions.empty()) throw EmptyInput("volume analysis needs points and directions");
  return detail::run_culled({volume.points, obstacles.sites, false}, directions, cutter, options);
}

inline AccessibilityReport brute_force_analyze_volume(const VolumeSamples& volume, const SurfaceSamples& obstacles,
                                                      const DirectionSet& directions, const Cutter& cutter,
                                                      const AccessibilityOptions& options = {}) {
  options.check();
  if (volume.empty() || directions.empty()) throw EmptyInput("volume analysis needs points and directions");
  return detail::run_brute({volume.points, obstacles.sites, false}, directions, cutter, options);
}

}  // namespace millaccess
