#include <gtest/gtest.h>

#include "millaccess/metrics.hpp"

using namespace millaccess;

namespace {
using Labels = std::vector<std::uint8_t>;
}

TEST(Confusion, Examples) {
  EXPECT_EQ(confusion(Labels{1, 0, 1}, Labels{1, 0, 1}), (Confusion{2, 0, 1, 0}));
  const Confusion c = confusion(Labels{1, 1, 1, 0}, Labels{0, 1, 1, 1});
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.tn, 0u);
  EXPECT_THROW(confusion(Labels{1, 0}, Labels{1}), LengthMismatch);
}

TEST(Confusion, KindsMustAgree) {
  const LabelVector a{{1, 0}, LabelKind::inaccessible}, b{{1, 0}, LabelKind::occlusion};
  EXPECT_THROW(confusion(a, b), LengthMismatch);
  EXPECT_EQ(confusion(a, a).tp, 1u);
}

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(confusion(Labels{1, 0, 1}, Labels{1, 0, 1})), 1.0);
  EXPECT_EQ(accuracy(Confusion{2, 1, 0, 1}), 0.5);
  EXPECT_EQ(accuracy(confusion(Labels{0, 0, 0}, Labels{0, 0, 0})), 1.0);
  EXPECT_THROW(accuracy(Confusion{}), InvalidArgument);
}

TEST(F1, Examples) {
  // gt positives {1,2,3}, pred positives {2,3,4} over indices 0..4.
  const Confusion c = confusion(Labels{0, 1, 1, 1, 0}, Labels{0, 0, 1, 1, 1});
  EXPECT_EQ(c, (Confusion{2, 1, 1, 1}));
  EXPECT_NEAR(f1(c), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(f1(Confusion{5, 0, 3, 0}), 1.0);
  EXPECT_EQ(f1(confusion(Labels{1, 0, 1}, Labels{0, 0, 0})), 0.0);
  EXPECT_EQ(f1(confusion(Labels{0, 0}, Labels{0, 0})), 1.0);  // vacuous
}

TEST(ScoreShape, AllZeroPrediction) {
  const Labels gt_i{1, 0, 0, 0}, gt_o{0, 1, 0, 0}, zero(4, 0);
  const ShapeScores s = score_shape(gt_i, zero, gt_o, zero);
  EXPECT_EQ(s.acc_i, 0.75);
  EXPECT_EQ(s.f1_i, 0.0);
  EXPECT_EQ(s.f1_o, 0.0);
  const ShapeScores perfect = score_shape(gt_i, gt_i, gt_o, gt_o);
  EXPECT_EQ(perfect.acc_i, 1.0);
  EXPECT_EQ(perfect.f1_o, 1.0);
}

TEST(MeanScores, Unweighted) {
  const std::vector<ShapeScores> v{{1, 1, 1, 1}, {0.5, 0, 0.25, 0}};
  const ShapeScores m = mean_scores(v);
  EXPECT_EQ(m.acc_i, 0.75);
  EXPECT_EQ(m.f1_i, 0.5);
  EXPECT_EQ(m.acc_o, 0.625);
}
