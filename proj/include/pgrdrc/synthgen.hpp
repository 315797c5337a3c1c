#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pgrdrc/dataset.hpp"
#include "pgrdrc/error.hpp"
#include "pgrdrc/featurize.hpp"
#include "pgrdrc/layout.hpp"
#include "pgrdrc/rng.hpp"

namespace pgrdrc {

// Seeded generation with known ground truth; the verification substrate for
// everything downstream of featurization.
struct SynthConfig {
  std::uint64_t seed = 0;

  // tabular mode
  std::size_t n_negatives = 0;
  std::size_t n_positives = 0;
  std::size_t n_features = 0;
  double shift_sigmas = 0.0;  // anomaly displacement in sigma units

  // layout mode
  std::int64_t die_width = 0;   // nm
  std::int64_t die_height = 0;  // nm
  GridSpec grid{1, 1};
  std::size_t cell_count = 0;
  double target_utilization = 0.0;       // (0,1)
  std::size_t hotspot_count = 0;
  double hotspot_pin_multiplier = 2.0;   // > 1
};

// Negatives are i.i.d. per feature from N(mu_i, sigma_i^2) with the
// parameters drawn once from the seed. Each positive displaces a random
// subset of exactly max(1, n_features/2) features by +-shift_sigmas*sigma_i.
// Fixing the subset size keeps every positive's density penalty at the same
// scale, so a threshold tuned on one split transfers to another instead of
// calibrating to whichever anomaly happened to displace the fewest features.
inline Dataset generate_tabular(const SynthConfig& cfg) {
  if (cfg.n_features < 1) throw InputError("synth: n_features must be >= 1");
  if (cfg.n_negatives < 3) throw InputError("synth: need at least 3 negatives");
  if (cfg.shift_sigmas < 0.0) throw InputError("synth: shift_sigmas must be >= 0");

  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_features;
  std::vector<double> mu(n), sigma(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = rng.uniform(-5.0, 5.0);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = rng.uniform(0.5, 2.0);

  FeatureSchema schema;
  for (std::size_t i = 0; i < n; ++i) schema.names.push_back("f" + std::to_string(i));

  std::vector<GridSample> samples;
  samples.reserve(cfg.n_negatives + cfg.n_positives);
  auto draw_base = [&]() {
    GridSample s;
    s.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(rng.normal(mu[i], sigma[i]));
    return s;
  };

  for (std::size_t k = 0; k < cfg.n_negatives; ++k) {
    GridSample s = draw_base();
    s.label = 0;
    samples.push_back(std::move(s));
  }

  const std::size_t n_displaced = std::max<std::size_t>(1, n / 2);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = 0; k < cfg.n_positives; ++k) {
    GridSample s = draw_base();
    rng.shuffle(order);
    for (std::size_t d = 0; d < n_displaced; ++d) {
      const std::size_t i = order[d];
      const double sign = rng.bounded(2) == 0 ? 1.0 : -1.0;
      s.values[i] += sign * cfg.shift_sigmas * sigma[i];
    }
    s.label = 1;
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(schema), std::move(samples));
}

namespace detail {

inline Rect place_pin_on_boundary(const Rect& cell, Rng& rng) {
  const std::int64_t psz = std::max<std::int64_t>(
      1, std::min<std::int64_t>({100, cell.width() / 2, cell.height() / 2}));
  Rect pin;
  switch (rng.bounded(4)) {
    case 0:  // bottom edge
      pin.x0 = cell.x0 + rng.uniform_int(0, cell.width() - psz);
      pin.y0 = cell.y0;
      break;
    case 1:  // top edge
      pin.x0 = cell.x0 + rng.uniform_int(0, cell.width() - psz);
      pin.y0 = cell.y1 - psz;
      break;
    case 2:  // left edge
      pin.x0 = cell.x0;
      pin.y0 = cell.y0 + rng.uniform_int(0, cell.height() - psz);
      break;
    default:  // right edge
      pin.x0 = cell.x1 - psz;
      pin.y0 = cell.y0 + rng.uniform_int(0, cell.height() - psz);
      break;
  }
  pin.x1 = pin.x0 + psz;
  pin.y1 = pin.y0 + psz;
  return pin;
}

}  // namespace detail

// Uniform rejection placement against a per-tile utilization cap. The first
// hotspot_count cells are anchors centered in the hotspot tiles; anchors
// carry the multiplier's extra pins so the surplus lands inside the tile.
// A violation marker is placed strictly inside every hotspot tile and
// nowhere else.
inline Layout generate_layout(const SynthConfig& cfg) {
  validate_grid_spec(cfg.grid);
  if (cfg.die_width < 1 || cfg.die_height < 1) throw InputError("synth: die dimensions must be positive");
  if (!(cfg.target_utilization > 0.0 && cfg.target_utilization < 1.0))
    throw InputError("synth: target_utilization must lie in (0,1)");
  if (!(cfg.hotspot_pin_multiplier > 1.0)) throw InputError("synth: hotspot_pin_multiplier must be > 1");
  const std::size_t n_tiles = static_cast<std::size_t>(cfg.grid.rows) * cfg.grid.cols;
  if (cfg.hotspot_count > n_tiles) throw InputError("synth: more hotspots than grid tiles");
  if (cfg.cell_count < cfg.hotspot_count)
    throw InputError("synth: cell_count must cover one anchor cell per hotspot");

  Layout layout;
  layout.die = Rect{0, 0, cfg.die_width, cfg.die_height};
  const std::int64_t bw = cfg.die_width / cfg.grid.cols;
  const std::int64_t bh = cfg.die_height / cfg.grid.rows;
  if (bw < 8 || bh < 8) throw InputError("synth: grid tiles are too small to place cells");

  // Standard-cell dimensions: fixed row height, drawn width.
  const std::int64_t cell_h = std::min<std::int64_t>(2000, bh / 2);
  const std::int64_t w_lo = std::min<std::int64_t>(1000, bw / 2);
  const std::int64_t w_hi = std::min<std::int64_t>(4000, bw - 2);
  const double avg_cell_area =
      static_cast<double>(cell_h) * static_cast<double>(w_lo + w_hi) / 2.0;
  const double die_area = static_cast<double>(cfg.die_width) * static_cast<double>(cfg.die_height);
  if (static_cast<double>(cfg.cell_count) * avg_cell_area > cfg.target_utilization * die_area)
    throw InputError("synth: utilization infeasible for cell count and die size");

  Rng rng(cfg.seed);

  std::vector<std::size_t> tile_order(n_tiles);
  std::iota(tile_order.begin(), tile_order.end(), 0);
  rng.shuffle(tile_order);
  std::vector<std::size_t> hotspots(tile_order.begin(),
                                    tile_order.begin() + static_cast<std::ptrdiff_t>(cfg.hotspot_count));

  std::vector<double> used_area(n_tiles, 0.0);
  std::vector<double> cap(n_tiles);
  for (std::size_t t = 0; t < n_tiles; ++t) {
    const Rect tile = grid_rect(layout.die, cfg.grid, static_cast<int>(t) / cfg.grid.cols,
                                static_cast<int>(t) % cfg.grid.cols);
    cap[t] = cfg.target_utilization * static_cast<double>(tile.width()) *
             static_cast<double>(tile.height());
  }

  auto touched_tiles = [&](const Rect& r) {
    std::vector<std::size_t> tiles;
    const detail::GridRange range = detail::touched_range(layout.die, cfg.grid, bw, bh, r);
    if (range.empty()) return tiles;
    for (int i = range.r0; i <= range.r1; ++i)
      for (int j = range.c0; j <= range.c1; ++j)
        tiles.push_back(static_cast<std::size_t>(i) * cfg.grid.cols + j);
    return tiles;
  };

  auto try_commit = [&](const Rect& r) {
    const std::vector<std::size_t> tiles = touched_tiles(r);
    for (std::size_t t : tiles) {
      const Rect tile = grid_rect(layout.die, cfg.grid, static_cast<int>(t) / cfg.grid.cols,
                                  static_cast<int>(t) % cfg.grid.cols);
      if (used_area[t] + overlap_area_um2(r, tile) * 1e6 > cap[t]) return false;
    }
    for (std::size_t t : tiles) {
      const Rect tile = grid_rect(layout.die, cfg.grid, static_cast<int>(t) / cfg.grid.cols,
                                  static_cast<int>(t) % cfg.grid.cols);
      used_area[t] += overlap_area_um2(r, tile) * 1e6;
    }
    return true;
  };

  // Anchor cells, one centered in each hotspot tile.
  for (std::size_t h = 0; h < cfg.hotspot_count; ++h) {
    const std::size_t t = hotspots[h];
    const Rect tile = grid_rect(layout.die, cfg.grid, static_cast<int>(t) / cfg.grid.cols,
                                static_cast<int>(t) % cfg.grid.cols);
    const std::int64_t w = std::min<std::int64_t>(2500, tile.width() - 2);
    const std::int64_t h_nm = std::min<std::int64_t>(cell_h, tile.height() - 2);
    Rect r;
    r.x0 = tile.x0 + (tile.width() - w) / 2;
    r.y0 = tile.y0 + (tile.height() - h_nm) / 2;
    r.x1 = r.x0 + w;
    r.y1 = r.y0 + h_nm;
    if (!try_commit(r)) throw InputError("synth: utilization infeasible for cell count and die size");
    layout.cells.push_back(Cell{"c" + std::to_string(layout.cells.size()), r});
  }

  // Remaining cells: uniform with rejection against the per-tile caps.
  for (std::size_t k = cfg.hotspot_count; k < cfg.cell_count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const std::int64_t w = rng.uniform_int(w_lo, w_hi);
      Rect r;
      r.x0 = rng.uniform_int(0, cfg.die_width - w);
      r.y0 = rng.uniform_int(0, cfg.die_height - cell_h);
      r.x1 = r.x0 + w;
      r.y1 = r.y0 + cell_h;
      placed = try_commit(r);
      if (placed) layout.cells.push_back(Cell{"c" + std::to_string(layout.cells.size()), r});
    }
    if (!placed) throw InputError("synth: utilization infeasible for cell count and die size");
  }

  // Pins on cell boundaries; net ids from a bounded-fanout stream.
  std::size_t net_counter = 0;
  std::uint64_t fanout_left = 0;
  auto next_net = [&]() {
    if (fanout_left == 0) {
      ++net_counter;
      fanout_left = 2 + rng.bounded(4);  // fanout 2..5
    }
    --fanout_left;
    return "n" + std::to_string(net_counter - 1);
  };
  for (const Cell& cell : layout.cells) {
    const std::uint64_t n_pins = 2 + rng.bounded(3);  // 2..4 pins per cell
    for (std::uint64_t p = 0; p < n_pins; ++p)
      layout.pins.push_back(Pin{"p" + std::to_string(layout.pins.size()), cell.id, next_net(),
                                detail::place_pin_on_boundary(cell.rect, rng)});
  }

  // Hotspot surplus: bring each hotspot tile's pin count to roughly
  // multiplier x the die-wide average by loading the anchor's boundary.
  const double base_avg = static_cast<double>(layout.pins.size()) / static_cast<double>(n_tiles);
  const std::size_t extra =
      static_cast<std::size_t>(std::ceil((cfg.hotspot_pin_multiplier - 1.0) * base_avg));
  for (std::size_t h = 0; h < cfg.hotspot_count; ++h) {
    const Cell& anchor = layout.cells[h];
    for (std::size_t p = 0; p < extra; ++p)
      layout.pins.push_back(Pin{"p" + std::to_string(layout.pins.size()), anchor.id, next_net(),
                                detail::place_pin_on_boundary(anchor.rect, rng)});
  }

  // One violation marker strictly inside each hotspot tile.
  for (std::size_t t : hotspots) {
    const Rect tile = grid_rect(layout.die, cfg.grid, static_cast<int>(t) / cfg.grid.cols,
                                static_cast<int>(t) % cfg.grid.cols);
    Rect v;
    v.x0 = tile.x0 + 2 * tile.width() / 5;
    v.y0 = tile.y0 + 2 * tile.height() / 5;
    v.x1 = v.x0 + std::max<std::int64_t>(1, tile.width() / 10);
    v.y1 = v.y0 + std::max<std::int64_t>(1, tile.height() / 10);
    layout.violations.push_back(v);
  }

  validate_layout(layout);
  return layout;
}

}  // namespace pgrdrc
