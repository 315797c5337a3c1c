#include "pgrdrc/synthgen.hpp"

#include <gtest/gtest.h>

#include <set>

#include "pgrdrc/density_model.hpp"
#include "pgrdrc/error.hpp"
#include "pgrdrc/featurize.hpp"
#include "pgrdrc/threshold.hpp"
#include "support/tmpdir.hpp"

using pgrdrc::Dataset;
using pgrdrc::generate_layout;
using pgrdrc::generate_tabular;
using pgrdrc::InputError;
using pgrdrc::Layout;
using pgrdrc::SynthConfig;

namespace {

SynthConfig tabular_config(std::uint64_t seed, std::size_t neg, std::size_t pos, std::size_t features,
                           double shift) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.n_negatives = neg;
  cfg.n_positives = pos;
  cfg.n_features = features;
  cfg.shift_sigmas = shift;
  return cfg;
}

SynthConfig layout_config(std::uint64_t seed, int rows, int cols, std::size_t cells,
                          std::size_t hotspots, double multiplier) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.die_width = 200000;
  cfg.die_height = 200000;
  cfg.grid = pgrdrc::GridSpec{rows, cols};
  cfg.cell_count = cells;
  cfg.target_utilization = 0.45;
  cfg.hotspot_count = hotspots;
  cfg.hotspot_pin_multiplier = multiplier;
  return cfg;
}

TEST(Tabular, DeterministicPerSeed) {
  const auto cfg = tabular_config(5, 50, 10, 4, 3.0);
  EXPECT_EQ(generate_tabular(cfg), generate_tabular(cfg));
  auto other = cfg;
  other.seed = 6;
  EXPECT_NE(generate_tabular(cfg), generate_tabular(other));
}

TEST(Tabular, LabelBookkeepingMatchesRequestedCounts) {
  const Dataset ds = generate_tabular(tabular_config(1, 40, 7, 3, 5.0));
  EXPECT_EQ(ds.size(), 47u);
  EXPECT_EQ(ds.count_label(1), 7u);
  EXPECT_EQ(ds.count_label(0), 40u);
  EXPECT_TRUE(ds.labeled());
  // Negatives come first in generation order.
  EXPECT_EQ(*ds.samples()[0].label, 0);
  EXPECT_EQ(*ds.samples()[46].label, 1);
}

TEST(Tabular, InvalidConfigsAreErrors) {
  EXPECT_THROW(generate_tabular(tabular_config(0, 2, 0, 3, 1.0)), InputError);
  EXPECT_THROW(generate_tabular(tabular_config(0, 10, 0, 0, 1.0)), InputError);
  EXPECT_THROW(generate_tabular(tabular_config(0, 10, 0, 3, -1.0)), InputError);
}

// Null construction: zero shift leaves the positives distributionally
// identical to the negatives, so tuning cannot do better than flagging
// almost everything and F1 stays near the prevalence level.
TEST(Tabular, ZeroShiftIsIndistinguishable) {
  const Dataset ds = generate_tabular(tabular_config(3, 2000, 200, 6, 0.0));
  const auto parts = pgrdrc::split(ds, 3);
  const auto model = pgrdrc::fit(parts.train);
  const auto result = pgrdrc::tune(model, parts.validation);
  const double prevalence_f1 = 2.0 * 0.1 / 1.1;  // flag-everything baseline at ~9% positives
  EXPECT_LT(result.objective_value, 2.5 * prevalence_f1);
}

// Separation: a large shift makes the pipeline reach exact F1 = 1 on the
// held-out test split, with disjoint score ranges.
TEST(Tabular, LargeShiftSeparatesEndToEnd) {
  const Dataset ds = generate_tabular(tabular_config(9, 5000, 50, 8, 8.0));
  const auto parts = pgrdrc::split(ds, 9);
  const auto model = pgrdrc::fit(parts.train);
  const auto result = pgrdrc::tune(model, parts.validation);
  EXPECT_DOUBLE_EQ(result.objective_value, 1.0);

  const auto tuned = pgrdrc::with_log_epsilon(model, result.log_epsilon);
  const std::vector<int> preds = pgrdrc::predict(tuned, parts.test);
  double worst_neg = 0.0, best_pos = std::numeric_limits<double>::lowest();
  const std::vector<double> scores = pgrdrc::score_all(tuned, parts.test);
  std::size_t i = 0;
  for (const auto& s : parts.test.samples()) {
    EXPECT_EQ(preds[i], *s.label) << "sample " << i;
    if (*s.label == 1)
      best_pos = std::max(best_pos, scores[i]);
    else
      worst_neg = std::min(worst_neg, scores[i]);
    ++i;
  }
  EXPECT_LT(best_pos, worst_neg);  // disjoint score ranges
}

TEST(LayoutMode, DeterministicPerSeed) {
  const auto cfg = layout_config(11, 3, 3, 80, 2, 3.0);
  EXPECT_EQ(generate_layout(cfg), generate_layout(cfg));
  auto other = cfg;
  other.seed = 12;
  EXPECT_NE(generate_layout(cfg), generate_layout(other));
}

TEST(LayoutMode, NoHotspotsMeansNoViolations) {
  const Layout layout = generate_layout(layout_config(2, 3, 3, 60, 0, 2.0));
  EXPECT_TRUE(layout.violations.empty());
  const Dataset labeled =
      pgrdrc::label_grids(layout, {3, 3}, pgrdrc::featurize(layout, {3, 3}));
  for (const auto& s : labeled.samples()) EXPECT_EQ(*s.label, 0);
}

TEST(LayoutMode, OneHotspotLabelsExactlyOneGrid) {
  const Layout layout = generate_layout(layout_config(4, 2, 2, 40, 1, 3.0));
  ASSERT_EQ(layout.violations.size(), 1u);
  const Dataset labeled =
      pgrdrc::label_grids(layout, {2, 2}, pgrdrc::featurize(layout, {2, 2}));
  std::size_t positives = 0;
  for (const auto& s : labeled.samples()) positives += static_cast<std::size_t>(*s.label);
  EXPECT_EQ(positives, 1u);
}

// Hotspot grids must dominate every non-hotspot grid in pin density once the
// multiplier is 3 or more.
TEST(LayoutMode, HotspotPinDensityStrictlyDominates) {
  const std::size_t pin_density_idx = 0;  // canonical order: pin_density first
  for (std::uint64_t seed = 100; seed < 122; ++seed) {
    const auto cfg = layout_config(seed, 4, 4, 320, 2, 3.0);
    const Layout layout = generate_layout(cfg);
    const Dataset labeled =
        pgrdrc::label_grids(layout, cfg.grid, pgrdrc::featurize(layout, cfg.grid));
    double min_hot = std::numeric_limits<double>::max();
    double max_cold = 0.0;
    for (const auto& s : labeled.samples()) {
      if (*s.label == 1)
        min_hot = std::min(min_hot, s.values[pin_density_idx]);
      else
        max_cold = std::max(max_cold, s.values[pin_density_idx]);
    }
    EXPECT_GT(min_hot, max_cold) << "seed " << seed;
  }
}

// Ground-truth consistency: the violation markers sit exactly in the tiles
// the generator selected, and labeling recovers that set.
TEST(LayoutMode, ViolationsLandInDistinctTiles) {
  const auto cfg = layout_config(31, 4, 4, 100, 5, 2.5);
  const Layout layout = generate_layout(cfg);
  ASSERT_EQ(layout.violations.size(), 5u);
  std::set<std::string> violated;
  const auto tiles = pgrdrc::grid_rects(layout.die, cfg.grid);
  for (const auto& v : layout.violations) {
    for (std::size_t t = 0; t < tiles.size(); ++t)
      if (pgrdrc::overlaps(v, tiles[t])) violated.insert("t" + std::to_string(t));
  }
  EXPECT_EQ(violated.size(), 5u);  // strictly inside: one tile each, all distinct

  const Dataset labeled = pgrdrc::label_grids(layout, cfg.grid, pgrdrc::featurize(layout, cfg.grid));
  EXPECT_EQ(labeled.count_label(1), 5u);
}

TEST(LayoutMode, RoundTripsThroughTheLayoutFile) {
  testsupport::TmpDir dir("synth");
  const Layout layout = generate_layout(layout_config(8, 3, 4, 90, 3, 2.0));
  const auto path = dir.file("l.json");
  pgrdrc::write_layout(layout, path);
  EXPECT_EQ(pgrdrc::parse_layout(path), layout);
}

TEST(LayoutMode, InfeasibleUtilizationIsAnError) {
  auto cfg = layout_config(1, 2, 2, 40, 0, 2.0);
  cfg.cell_count = 100000;  // cannot fit under the utilization cap
  EXPECT_THROW(generate_layout(cfg), InputError);
}

TEST(LayoutMode, InvalidConfigsAreErrors) {
  auto cfg = layout_config(1, 2, 2, 40, 1, 3.0);
  cfg.target_utilization = 1.0;
  EXPECT_THROW(generate_layout(cfg), InputError);
  cfg = layout_config(1, 2, 2, 40, 1, 1.0);  // multiplier must exceed 1
  EXPECT_THROW(generate_layout(cfg), InputError);
  cfg = layout_config(1, 2, 2, 40, 5, 3.0);  // more hotspots than tiles
  EXPECT_THROW(generate_layout(cfg), InputError);
  cfg = layout_config(1, 2, 2, 2, 3, 3.0);  // fewer cells than anchors
  EXPECT_THROW(generate_layout(cfg), InputError);
}

}  // namespace
