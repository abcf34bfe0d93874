#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "millaccess/errors.hpp"
#include "millaccess/geometry.hpp"
#include "millaccess/random.hpp"

namespace millaccess {

inline constexpr double kContactTolerance = 1e-6;  // mm
inline constexpr double kDefaultSigma = 5.0;       // mm

/// Ball-end cutter stacked along +Z from the tip:
/// ball (radius ball_radius) -> body cylinder (ball_radius, body_height)
/// -> holder cylinder (holder_radius, holder_height) -> shaft space.
struct Cutter {
  double ball_radius = 1.0;    // CR
  double body_height = 0.0;    // CH
  double holder_radius = 1.0;  // FR
  double holder_height = 0.0;  // FH
  double shaft_radius = std::numeric_limits<double>::infinity();

  /// Height of the top of the holder, above which the shaft region begins.
  double total_height() const { return ball_radius + body_height + holder_height; }

  bool valid() const {
    return ball_radius > 0 && body_height >= 0 && holder_radius > 0 && holder_height >= 0 &&
           std::isfinite(ball_radius) && std::isfinite(body_height) && std::isfinite(holder_radius) &&
           std::isfinite(holder_height) && shaft_radius >= std::max(ball_radius, holder_radius);
  }

  /// Cutter with the shaft radius tied to the holder: FR + sigma.
  static Cutter with_margin(double cr, double ch, double fr, double fh, double sigma = kDefaultSigma) {
    Cutter c{cr, ch, fr, fh, fr + sigma};
    if (!c.valid()) throw InvalidArgument("invalid cutter parameters");
    return c;
  }

  friend bool operator==(const Cutter&, const Cutter&) = default;
};

enum class CutterRegion { none, ball, body, holder, shaft };

inline std::string_view to_string(CutterRegion r) {
  switch (r) {
    case CutterRegion::none: return "none";
    case CutterRegion::ball: return "ball";
    case CutterRegion::body: return "body";
    case CutterRegion::holder: return "holder";
    case CutterRegion::shaft: return "shaft";
  }
  return "none";
}

/// Precomputed thresholds for classifying points in the cutter frame.
///
/// Every region is shrunk by the contact tolerance so points exactly on the
/// cutter surface do not collide.
struct CutterClassifier {
  double ball_radius;
  double ball_top;        // CR
  double body_top;        // CR + CH
  double holder_top;      // CR + CH + FH
  double ball_limit_sq;   // (CR - eps)^2
  double body_limit_sq;   // (CR - eps)^2, compared against r^2
  double holder_limit_sq; // (FR - eps)^2
  double shaft_limit_sq;  // (shaft - eps)^2, +inf for an unbounded shaft
  double body_limit;
  double holder_limit;
  double shaft_limit;

  explicit CutterClassifier(const Cutter& c, double eps = kContactTolerance)
      : ball_radius(c.ball_radius),
        ball_top(c.ball_radius),
        body_top(c.ball_radius + c.body_height),
        holder_top(c.total_height()),
        ball_limit_sq((c.ball_radius - eps) * (c.ball_radius - eps)),
        body_limit_sq(0),
        holder_limit_sq(0),
        shaft_limit_sq(0),
        body_limit(c.ball_radius - eps),
        holder_limit(c.holder_radius - eps),
        shaft_limit(c.shaft_radius - eps) {
    body_limit_sq = squared_limit(body_limit);
    holder_limit_sq = squared_limit(holder_limit);
    shaft_limit_sq = squared_limit(shaft_limit);
  }

  /// Classification of a point given in the cutter frame (tip at origin, axis +Z).
  CutterRegion classify(const Vec3& p) const { return classify(p.x * p.x + p.y * p.y, p.z); }

  /// Same, from the squared horizontal distance and height.
  CutterRegion classify(double r2, double z) const {
    if (z > holder_top) return r2 < shaft_limit_sq ? CutterRegion::shaft : CutterRegion::none;
    if (z >= body_top) return r2 < holder_limit_sq ? CutterRegion::holder : CutterRegion::none;
    if (z >= ball_top) return r2 < body_limit_sq ? CutterRegion::body : CutterRegion::none;
    if (z >= 0.0) {
      const double dz = z - ball_radius;
      return r2 + dz * dz < ball_limit_sq ? CutterRegion::ball : CutterRegion::none;
    }
    return CutterRegion::none;
  }

  bool collides(double r2, double z) const { return classify(r2, z) != CutterRegion::none; }

 private:
  // r < L  <=>  r^2 < L^2 for L > 0; a non-positive limit admits nothing.
  static double squared_limit(double limit) {
    if (std::isinf(limit)) return limit;
    return limit > 0 ? limit * limit : -1.0;
  }
};

inline CutterRegion collide_point(const Cutter& cutter, const Vec3& p, double eps = kContactTolerance) {
  return CutterClassifier(cutter, eps).classify(p);
}

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

enum class PresetName { uniform, short_cutter, long_cutter, extreme };

/// Sampling ranges for random cutters.
struct CutterPreset {
  PresetName name = PresetName::uniform;
  Interval ball_radius{1.0, 2.0};
  Interval body_height{0.1, 10.1};
  Interval holder_radius{5.0, 100.0};
  Interval holder_height{0.1, 10.1};

  bool valid() const {
    for (const Interval& i : {ball_radius, body_height, holder_radius, holder_height})
      if (!(i.lo > 0 && i.lo <= i.hi)) return false;
    return true;
  }

  static CutterPreset uniform() { return {}; }
  static CutterPreset short_cutter() {
    return {PresetName::short_cutter, {1.0, 2.0}, {0.1, 0.2}, {80.0, 100.0}, {0.1, 0.2}};
  }
  static CutterPreset long_cutter() {
    return {PresetName::long_cutter, {1.0, 2.0}, {10.0, 10.1}, {5.0, 5.1}, {10.0, 10.1}};
  }
  static CutterPreset extreme() {
    return {PresetName::extreme, {1.0, 2.0}, {20.0, 20.1}, {5.0, 5.1}, {20.0, 20.1}};
  }

  static CutterPreset from_name(std::string_view name) {
    if (name == "uniform") return uniform();
    if (name == "short") return short_cutter();
    if (name == "long") return long_cutter();
    if (name == "extreme") return extreme();
    throw InvalidArgument("unknown cutter preset '" + std::string(name) + "'");
  }
};

inline std::string_view to_string(PresetName p) {
  switch (p) {
    case PresetName::uniform: return "uniform";
    case PresetName::short_cutter: return "short";
    case PresetName::long_cutter: return "long";
    case PresetName::extreme: return "extreme";
  }
  return "uniform";
}

/// Draws CR, CH, FR, FH uniformly from the preset ranges (in that order).
inline Cutter random_cutter(const CutterPreset& preset, std::uint64_t seed, double sigma = kDefaultSigma) {
  if (!preset.valid()) throw InvalidArgument("invalid cutter preset");
  Rng rng(seed);
  Cutter c;
  c.ball_radius = rng.uniform(preset.ball_radius.lo, preset.ball_radius.hi);
  c.body_height = rng.uniform(preset.body_height.lo, preset.body_height.hi);
  c.holder_radius = rng.uniform(preset.holder_radius.lo, preset.holder_radius.hi);
  c.holder_height = rng.uniform(preset.holder_height.lo, preset.holder_height.hi);
  c.shaft_radius = c.holder_radius + sigma;
  return c;
}

/// Parses "CR,CH,FR,FH" (millimetres).
inline Cutter parse_cutter(std::string_view text, double sigma = kDefaultSigma) {
  const auto fail = [&] { return InvalidArgument("cutter must be CR,CH,FR,FH; got '" + std::string(text) + "'"); };
  std::array<double, 4> v{};
  std::size_t field = 0;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = text.find(',', pos);
    const std::string token(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (field >= v.size() || token.empty()) throw fail();
    std::size_t used = 0;
    try {
      v[field++] = std::stod(token, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != token.size()) throw fail();
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (field != v.size()) throw fail();
  return Cutter::with_margin(v[0], v[1], v[2], v[3], sigma);
}

}  // namespace millaccess
