#include "pgrdrc/metrics.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "pgrdrc/error.hpp"
#include "pgrdrc/rng.hpp"

using pgrdrc::confusion;
using pgrdrc::ConfusionMatrix;
using pgrdrc::EvalReport;
using pgrdrc::InputError;
using pgrdrc::report;

namespace {

TEST(Confusion, CountsStandardCells) {
  const std::vector<int> labels = {1, 1, 0, 0};
  const std::vector<int> preds = {1, 0, 0, 0};
  const ConfusionMatrix m = confusion(labels, preds);
  EXPECT_EQ(m.tp, 1);
  EXPECT_EQ(m.fn, 1);
  EXPECT_EQ(m.fp, 0);
  EXPECT_EQ(m.tn, 2);
}

TEST(Confusion, PerfectPredictionsHaveNoErrors) {
  const std::vector<int> labels = {1, 0, 1, 0, 0};
  const ConfusionMatrix m = confusion(labels, labels);
  EXPECT_EQ(m.fp, 0);
  EXPECT_EQ(m.fn, 0);
  EXPECT_EQ(m.tp, 2);
  EXPECT_EQ(m.tn, 3);
}

TEST(Confusion, TotalInversionHasNoCorrectCells) {
  const std::vector<int> labels = {1, 0, 1, 0};
  std::vector<int> preds;
  for (int l : labels) preds.push_back(1 - l);
  const ConfusionMatrix m = confusion(labels, preds);
  EXPECT_EQ(m.tp, 0);
  EXPECT_EQ(m.tn, 0);
  EXPECT_EQ(m.fp, 2);
  EXPECT_EQ(m.fn, 2);
}

TEST(Confusion, ErrorsOnMismatchAndEmpty) {
  const std::vector<int> one = {1};
  const std::vector<int> two = {1, 0};
  const std::vector<int> none;
  EXPECT_THROW(confusion(one, two), InputError);
  EXPECT_THROW(confusion(none, none), InputError);
}

TEST(Report, ComputesTableMetrics) {
  const EvalReport r = report(ConfusionMatrix{2, 1, 0, 7});
  EXPECT_DOUBLE_EQ(*r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*r.recall, 1.0);
  EXPECT_DOUBLE_EQ(*r.accuracy, 0.9);
  EXPECT_DOUBLE_EQ(*r.f1, 0.8);
}

TEST(Report, AllNegativeDegenerateUsesUndefinedMarkers) {
  const EvalReport r = report(ConfusionMatrix{0, 0, 0, 10});
  EXPECT_FALSE(r.precision.has_value());
  EXPECT_FALSE(r.recall.has_value());
  EXPECT_FALSE(r.f1.has_value());
  EXPECT_DOUBLE_EQ(*r.accuracy, 1.0);
  EXPECT_NE(pgrdrc::format_report(r).find("n/a"), std::string::npos);
}

TEST(Report, ReportedHeadlineNumbersAreInternallyConsistent) {
  // Recall 100% with precision 99.28% must land on a 99.64% F1.
  const EvalReport r = report(ConfusionMatrix{9928, 72, 0, 990000});
  EXPECT_NEAR(*r.precision, 0.9928, 1e-12);
  EXPECT_DOUBLE_EQ(*r.recall, 1.0);
  EXPECT_NEAR(*r.f1, 2.0 * 0.9928 / 1.9928, 1e-12);
  EXPECT_NEAR(*r.f1, 0.9964, 5e-5);
}

TEST(Report, JsonUsesNullForUndefined) {
  const nlohmann::json j = pgrdrc::report_json(report(ConfusionMatrix{0, 0, 0, 4}));
  EXPECT_TRUE(j["precision"].is_null());
  EXPECT_TRUE(j["f1"].is_null());
  EXPECT_DOUBLE_EQ(j["accuracy"].get<double>(), 1.0);
  EXPECT_EQ(j["tn"].get<int>(), 4);
}

// Range, harmonic bound, zero-FN law and label/pred symmetry over random
// confusion matrices.
TEST(Properties, MetricLawsHoldOnRandomMatrices) {
  pgrdrc::Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const ConfusionMatrix m{static_cast<std::int64_t>(rng.bounded(20)),
                            static_cast<std::int64_t>(rng.bounded(20)),
                            static_cast<std::int64_t>(rng.bounded(20)),
                            static_cast<std::int64_t>(rng.bounded(20))};
    if (m.total() == 0) continue;
    const EvalReport r = report(m);
    for (const auto& v : {r.precision, r.recall, r.accuracy, r.f1}) {
      if (v) {
        EXPECT_GE(*v, 0.0);
        EXPECT_LE(*v, 1.0);
      }
    }
    if (r.precision && r.recall && r.f1) {
      EXPECT_GE(*r.f1, std::min(*r.precision, *r.recall) - 1e-12);
      EXPECT_LE(*r.f1, std::max(*r.precision, *r.recall) + 1e-12);
    }
    if (m.fn == 0 && m.tp > 0) EXPECT_DOUBLE_EQ(*r.recall, 1.0);

    // Swapping labels and predictions transposes fp <-> fn.
    const EvalReport swapped = report(ConfusionMatrix{m.tp, m.fn, m.fp, m.tn});
    EXPECT_EQ(swapped.matrix.fp, m.fn);
    EXPECT_EQ(swapped.matrix.fn, m.fp);
    if (r.accuracy) EXPECT_DOUBLE_EQ(*swapped.accuracy, *r.accuracy);
  }
}

TEST(Properties, ConfusionSwapMatchesTranspose) {
  pgrdrc::Rng rng(7);
  std::vector<int> labels, preds;
  for (int i = 0; i < 500; ++i) {
    labels.push_back(static_cast<int>(rng.bounded(2)));
    preds.push_back(static_cast<int>(rng.bounded(2)));
  }
  const ConfusionMatrix m = confusion(labels, preds);
  const ConfusionMatrix swapped = confusion(preds, labels);
  EXPECT_EQ(swapped.tp, m.tp);
  EXPECT_EQ(swapped.tn, m.tn);
  EXPECT_EQ(swapped.fp, m.fn);
  EXPECT_EQ(swapped.fn, m.fp);
}

}  // namespace
