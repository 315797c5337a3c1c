#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "pgrdrc/dataset.hpp"
#include "pgrdrc/error.hpp"
#include "pgrdrc/layout.hpp"

namespace pgrdrc {

// Canonical feature order; the contract between featurizer, model and CSVs.
inline const std::vector<std::string>& grid_feature_names() {
  static const std::vector<std::string> names = {
      "pin_density",        "cell_density",       "buried_nets",  "buried_cells",
      "buried_pins",        "intersecting_pins",  "intersecting_cells",
      "intersecting_nets",  "std_cell_count",     "std_cell_area",
      "area_utilization"};
  return names;
}

// Per-grid features. Counts are stored as reals; densities are per um^2;
// areas are um^2. buried = rect fully inside the grid (boundary touch counts
// as buried); intersecting = positive-area overlap without containment.
struct GridFeatures {
  double pin_density = 0.0;
  double cell_density = 0.0;
  double buried_nets = 0.0;
  double buried_cells = 0.0;
  double buried_pins = 0.0;
  double intersecting_pins = 0.0;
  double intersecting_cells = 0.0;
  double intersecting_nets = 0.0;
  double std_cell_count = 0.0;
  double std_cell_area = 0.0;
  double area_utilization = 0.0;

  std::vector<double> to_values() const {
    return {pin_density,        cell_density,       buried_nets,  buried_cells,
            buried_pins,        intersecting_pins,  intersecting_cells,
            intersecting_nets,  std_cell_count,     std_cell_area,
            area_utilization};
  }
};

namespace detail {

struct GridAccum {
  std::int64_t buried_cells = 0, intersecting_cells = 0;
  std::int64_t buried_pins = 0, intersecting_pins = 0;
  std::int64_t buried_nets = 0, intersecting_nets = 0;
  double cell_area_um2 = 0.0;
};

// Index ranges of the grid rows/columns an object touches with positive
// area, derived from the uniform tile pitch instead of scanning every grid.
struct GridRange {
  int r0 = 0, r1 = -1, c0 = 0, c1 = -1;
  bool empty() const { return r1 < r0 || c1 < c0; }
};

inline GridRange touched_range(const Rect& die, const GridSpec& grid, std::int64_t bw, std::int64_t bh,
                               const Rect& obj) {
  GridRange range;
  const std::int64_t lox = std::max(obj.x0, die.x0), hix = std::min(obj.x1, die.x1);
  const std::int64_t loy = std::max(obj.y0, die.y0), hiy = std::min(obj.y1, die.y1);
  if (lox >= hix || loy >= hiy) return range;  // no die overlap
  auto index = [](std::int64_t offset, std::int64_t pitch, int count) {
    return static_cast<int>(std::min<std::int64_t>(offset / pitch, count - 1));
  };
  range.c0 = index(lox - die.x0, bw, grid.cols);
  range.c1 = index(hix - 1 - die.x0, bw, grid.cols);
  range.r0 = index(loy - die.y0, bh, grid.rows);
  range.r1 = index(hiy - 1 - die.y0, bh, grid.rows);
  return range;
}

}  // namespace detail

// Divides the die into rows x cols tiles and emits one unlabeled sample per
// tile in row-major order, grid_id "r{i}c{j}". A net's geometry is the
// bounding box of its pins' rects.
inline Dataset featurize(const Layout& layout, const GridSpec& grid) {
  validate_grid_spec(grid);
  const std::int64_t bw = layout.die.width() / grid.cols;
  const std::int64_t bh = layout.die.height() / grid.rows;
  if (bw == 0 || bh == 0)
    throw InputError("featurize: grid is finer than the die's nanometer extent");

  const std::size_t n_grids = static_cast<std::size_t>(grid.rows) * grid.cols;
  std::vector<detail::GridAccum> acc(n_grids);

  auto scatter = [&](const Rect& obj, auto&& on_grid) {
    const detail::GridRange range = detail::touched_range(layout.die, grid, bw, bh, obj);
    if (range.empty()) return;
    for (int r = range.r0; r <= range.r1; ++r)
      for (int c = range.c0; c <= range.c1; ++c) {
        const Rect tile = grid_rect(layout.die, grid, r, c);
        on_grid(acc[static_cast<std::size_t>(r) * grid.cols + c], tile);
      }
  };

  for (const Cell& cell : layout.cells)
    scatter(cell.rect, [&](detail::GridAccum& a, const Rect& tile) {
      tile.contains(cell.rect) ? ++a.buried_cells : ++a.intersecting_cells;
      a.cell_area_um2 += overlap_area_um2(cell.rect, tile);
    });
  for (const Pin& pin : layout.pins)
    scatter(pin.rect, [&](detail::GridAccum& a, const Rect& tile) {
      tile.contains(pin.rect) ? ++a.buried_pins : ++a.intersecting_pins;
    });
  for (const auto& [net, bbox] : net_bboxes(layout))
    scatter(bbox, [&](detail::GridAccum& a, const Rect& tile) {
      tile.contains(bbox) ? ++a.buried_nets : ++a.intersecting_nets;
    });

  std::vector<GridSample> samples;
  samples.reserve(n_grids);
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const detail::GridAccum& a = acc[static_cast<std::size_t>(r) * grid.cols + c];
      const double tile_um2 = area_um2(grid_rect(layout.die, grid, r, c));
      GridFeatures f;
      f.buried_cells = static_cast<double>(a.buried_cells);
      f.intersecting_cells = static_cast<double>(a.intersecting_cells);
      f.buried_pins = static_cast<double>(a.buried_pins);
      f.intersecting_pins = static_cast<double>(a.intersecting_pins);
      f.buried_nets = static_cast<double>(a.buried_nets);
      f.intersecting_nets = static_cast<double>(a.intersecting_nets);
      f.pin_density = static_cast<double>(a.buried_pins + a.intersecting_pins) / tile_um2;
      f.cell_density = static_cast<double>(a.buried_cells + a.intersecting_cells) / tile_um2;
      f.std_cell_count = static_cast<double>(a.buried_cells + a.intersecting_cells);
      f.std_cell_area = a.cell_area_um2;
      f.area_utilization = std::min(1.0, a.cell_area_um2 / tile_um2);
      GridSample s;
      s.values = f.to_values();
      s.grid_id = "r" + std::to_string(r) + "c" + std::to_string(c);
      samples.push_back(std::move(s));
    }
  return Dataset(FeatureSchema{grid_feature_names()}, std::move(samples));
}

// Label = 1 iff any violation marker overlaps the grid tile with positive
// area; a boundary touch does not count.
inline Dataset label_grids(const Layout& layout, const GridSpec& grid, const Dataset& ds) {
  validate_grid_spec(grid);
  const std::size_t n_grids = static_cast<std::size_t>(grid.rows) * grid.cols;
  if (ds.size() != n_grids)
    throw InputError("label_grids: dataset has " + std::to_string(ds.size()) + " samples, grid has " +
                     std::to_string(n_grids));
  if (ds.schema().names != grid_feature_names())
    throw InputError("label_grids: dataset schema does not match the featurizer's");

  std::vector<GridSample> labeled = ds.samples();
  std::size_t k = 0;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c, ++k) {
      const Rect tile = grid_rect(layout.die, grid, r, c);
      int label = 0;
      for (const Rect& v : layout.violations)
        if (overlaps(v, tile)) {
          label = 1;
          break;
        }
      labeled[k].label = label;
    }
  return Dataset(ds.schema(), std::move(labeled));
}

}  // namespace pgrdrc
