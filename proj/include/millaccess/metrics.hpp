#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "millaccess/errors.hpp"

namespace millaccess {

enum class LabelKind { inaccessible, occlusion };

struct LabelVector {
  std::vector<std::uint8_t> values;
  LabelKind kind = LabelKind::inaccessible;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

inline Confusion confusion(std::span<const std::uint8_t> gt, std::span<const std::uint8_t> pred) {
  if (gt.size() != pred.size())
    throw LengthMismatch("label lengths differ: " + std::to_string(gt.size()) + " vs " + std::to_string(pred.size()));
  Confusion c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool g = gt[i] != 0;
    const bool p = pred[i] != 0;
    if (g && p) ++c.tp;
    else if (!g && p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline Confusion confusion(const LabelVector& gt, const LabelVector& pred) {
  if (gt.kind != pred.kind) throw LengthMismatch("label kinds differ");
  return confusion(gt.values, pred.values);
}

inline double accuracy(const Confusion& c) {
  if (c.total() == 0) throw InvalidArgument("accuracy of an empty label set");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

/// 2tp / (2tp + fp + fn); 1.0 when there are no positives on either side.
inline double f1(const Confusion& c) {
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

/// The four per-shape scores reported by `evaluate`.
struct ShapeScores {
  double acc_i = 0, f1_i = 0, acc_o = 0, f1_o = 0;
};

inline ShapeScores score_shape(std::span<const std::uint8_t> gt_i, std::span<const std::uint8_t> pred_i,
                               std::span<const std::uint8_t> gt_o, std::span<const std::uint8_t> pred_o) {
  const Confusion ci = confusion(gt_i, pred_i);
  const Confusion co = confusion(gt_o, pred_o);
  return {accuracy(ci), f1(ci), accuracy(co), f1(co)};
}

/// Unweighted mean over shapes.
inline ShapeScores mean_scores(std::span<const ShapeScores> shapes) {
  ShapeScores m;
  if (shapes.empty()) return m;
  for (const ShapeScores& s : shapes) {
    m.acc_i += s.acc_i;
    m.f1_i += s.f1_i;
    m.acc_o += s.acc_o;
    m.f1_o += s.f1_o;
  }
  const double n = static_cast<double>(shapes.size());
  return {m.acc_i / n, m.f1_i / n, m.acc_o / n, m.f1_o / n};
}

}  // namespace millaccess
