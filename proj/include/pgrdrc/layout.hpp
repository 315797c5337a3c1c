#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pgrdrc/error.hpp"

namespace pgrdrc {

inline constexpr std::string_view kLayoutFormatVersion = "pgrdrc-layout-v1";

// Integer nanometers; no float geometry at boundaries.
struct Rect {
  std::int64_t x0 = 0;
  std::int64_t y0 = 0;
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;

  std::int64_t width() const { return x1 - x0; }
  std::int64_t height() const { return y1 - y0; }
  bool valid() const { return x0 < x1 && y0 < y1; }

  // Boundary-inclusive containment of `other` in *this.
  bool contains(const Rect& other) const {
    return other.x0 >= x0 && other.x1 <= x1 && other.y0 >= y0 && other.y1 <= y1;
  }

  bool operator==(const Rect&) const = default;
};

// Positive-area overlap; a shared edge does not count.
inline bool overlaps(const Rect& a, const Rect& b) {
  return std::min(a.x1, b.x1) > std::max(a.x0, b.x0) && std::min(a.y1, b.y1) > std::max(a.y0, b.y0);
}

inline double overlap_area_um2(const Rect& a, const Rect& b) {
  const std::int64_t w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const std::int64_t h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (w <= 0 || h <= 0) return 0.0;
  return static_cast<double>(w) * static_cast<double>(h) / 1e6;
}

inline double area_um2(const Rect& r) {
  return static_cast<double>(r.width()) * static_cast<double>(r.height()) / 1e6;
}

struct Cell {
  std::string id;
  Rect rect;

  bool operator==(const Cell&) const = default;
};

struct Pin {
  std::string id;
  std::string cell;  // owner cell id
  std::string net;
  Rect rect;

  bool operator==(const Pin&) const = default;
};

// Placed-design geometry. Net membership is derived: pins sharing a net id.
struct Layout {
  Rect die;
  std::vector<Cell> cells;
  std::vector<Pin> pins;
  std::vector<Rect> violations;

  bool operator==(const Layout&) const = default;
};

// Net ids in order of first appearance.
inline std::vector<std::string> net_ids(const Layout& layout) {
  std::vector<std::string> ids;
  std::unordered_set<std::string_view> seen;
  for (const Pin& p : layout.pins)
    if (seen.insert(p.net).second) ids.push_back(p.net);
  return ids;
}

// Bounding box of each net's pin rects, keyed by net id.
inline std::unordered_map<std::string, Rect> net_bboxes(const Layout& layout) {
  std::unordered_map<std::string, Rect> boxes;
  for (const Pin& p : layout.pins) {
    auto [it, inserted] = boxes.try_emplace(p.net, p.rect);
    if (!inserted) {
      Rect& b = it->second;
      b.x0 = std::min(b.x0, p.rect.x0);
      b.y0 = std::min(b.y0, p.rect.y0);
      b.x1 = std::max(b.x1, p.rect.x1);
      b.y1 = std::max(b.y1, p.rect.y1);
    }
  }
  return boxes;
}

inline void validate_layout(const Layout& layout) {
  if (!layout.die.valid()) throw InputError("layout: die rectangle is degenerate");
  std::unordered_set<std::string_view> cell_ids;
  for (const Cell& c : layout.cells) {
    if (c.id.empty()) throw InputError("layout: cell with empty id");
    if (!cell_ids.insert(c.id).second) throw InputError("layout: duplicate cell id \"" + c.id + "\"");
    if (!c.rect.valid()) throw InputError("layout: cell \"" + c.id + "\" has a degenerate rect");
    if (!overlaps(c.rect, layout.die))
      throw InputError("layout: cell \"" + c.id + "\" lies outside the die");
  }
  std::unordered_set<std::string_view> pin_ids;
  for (const Pin& p : layout.pins) {
    if (p.id.empty()) throw InputError("layout: pin with empty id");
    if (!pin_ids.insert(p.id).second) throw InputError("layout: duplicate pin id \"" + p.id + "\"");
    if (p.cell.empty()) throw InputError("layout: pin \"" + p.id + "\" has an empty owner-cell id");
    if (p.net.empty()) throw InputError("layout: pin \"" + p.id + "\" has an empty net id");
    if (!cell_ids.count(p.cell))
      throw InputError("layout: pin \"" + p.id + "\" references unknown cell \"" + p.cell + "\"");
    if (!p.rect.valid()) throw InputError("layout: pin \"" + p.id + "\" has a degenerate rect");
    if (!overlaps(p.rect, layout.die))
      throw InputError("layout: pin \"" + p.id + "\" lies outside the die");
  }
  for (std::size_t i = 0; i < layout.violations.size(); ++i) {
    if (!layout.violations[i].valid())
      throw InputError("layout: violation " + std::to_string(i) + " has a degenerate rect");
    if (!overlaps(layout.violations[i], layout.die))
      throw InputError("layout: violation " + std::to_string(i) + " lies outside the die");
  }
}

struct GridSpec {
  int rows = 1;
  int cols = 1;

  bool operator==(const GridSpec&) const = default;
};

inline void validate_grid_spec(const GridSpec& grid) {
  if (grid.rows < 1 || grid.cols < 1) throw InputError("grid: rows and cols must be >= 1");
}

// Equal integer division of the die; the last row/column absorbs the
// remainder nanometers. Row 0 / column 0 sit at the die's low y / low x.
inline Rect grid_rect(const Rect& die, const GridSpec& grid, int row, int col) {
  const std::int64_t bw = die.width() / grid.cols;
  const std::int64_t bh = die.height() / grid.rows;
  Rect r;
  r.x0 = die.x0 + bw * col;
  r.x1 = (col == grid.cols - 1) ? die.x1 : die.x0 + bw * (col + 1);
  r.y0 = die.y0 + bh * row;
  r.y1 = (row == grid.rows - 1) ? die.y1 : die.y0 + bh * (row + 1);
  return r;
}

// Row-major: r0c0, r0c1, ..., r1c0, ...
inline std::vector<Rect> grid_rects(const Rect& die, const GridSpec& grid) {
  validate_grid_spec(grid);
  std::vector<Rect> rects;
  rects.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int i = 0; i < grid.rows; ++i)
    for (int j = 0; j < grid.cols; ++j) rects.push_back(grid_rect(die, grid, i, j));
  return rects;
}

namespace detail {

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size() && i < byte; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline Rect rect_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    throw InputError("layout: " + where + " must be an array of 4 integers");
  for (const auto& v : j)
    if (!v.is_number_integer())
      throw InputError("layout: " + where + " coordinates must be integers (nanometers)");
  Rect r{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(),
         j[3].get<std::int64_t>()};
  if (!r.valid()) throw InputError("layout: " + where + ": x0 >= x1 or y0 >= y1");
  return r;
}

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InputError("layout: unknown key \"" + key + "\" in " + where);
}

}  // namespace detail

inline Layout parse_layout(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("layout: cannot open \"" + path.string() + "\"");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("layout: JSON syntax error near line " +
                     std::to_string(detail::line_of_byte(text, e.byte)) + " of \"" + path.string() +
                     "\": " + e.what());
  }
  if (!j.is_object()) throw InputError("layout: top-level JSON value must be an object");
  detail::reject_unknown_keys(j, {"format", "die", "cells", "pins", "violations"}, "layout");
  if (!j.contains("format") || !j["format"].is_string() ||
      j["format"].get<std::string>() != kLayoutFormatVersion)
    throw InputError("layout: missing or unsupported \"format\" (expected \"" +
                     std::string(kLayoutFormatVersion) + "\")");
  if (!j.contains("die")) throw InputError("layout: missing \"die\"");

  Layout layout;
  layout.die = detail::rect_from_json(j["die"], "die");

  if (j.contains("cells")) {
    if (!j["cells"].is_array()) throw InputError("layout: \"cells\" must be an array");
    std::size_t i = 0;
    for (const auto& cj : j["cells"]) {
      const std::string where = "cells[" + std::to_string(i++) + "]";
      if (!cj.is_object()) throw InputError("layout: " + where + " must be an object");
      detail::reject_unknown_keys(cj, {"id", "rect"}, where);
      if (!cj.contains("id") || !cj["id"].is_string() || !cj.contains("rect"))
        throw InputError("layout: " + where + " requires \"id\" (string) and \"rect\"");
      layout.cells.push_back(Cell{cj["id"].get<std::string>(),
                                  detail::rect_from_json(cj["rect"], where + ".rect")});
    }
  }
  if (j.contains("pins")) {
    if (!j["pins"].is_array()) throw InputError("layout: \"pins\" must be an array");
    std::size_t i = 0;
    for (const auto& pj : j["pins"]) {
      const std::string where = "pins[" + std::to_string(i++) + "]";
      if (!pj.is_object()) throw InputError("layout: " + where + " must be an object");
      detail::reject_unknown_keys(pj, {"id", "cell", "net", "rect"}, where);
      if (!pj.contains("id") || !pj["id"].is_string() || !pj.contains("cell") || !pj["cell"].is_string() ||
          !pj.contains("net") || !pj["net"].is_string() || !pj.contains("rect"))
        throw InputError("layout: " + where + " requires \"id\", \"cell\", \"net\" (strings) and \"rect\"");
      layout.pins.push_back(Pin{pj["id"].get<std::string>(), pj["cell"].get<std::string>(),
                                pj["net"].get<std::string>(),
                                detail::rect_from_json(pj["rect"], where + ".rect")});
    }
  }
  if (j.contains("violations")) {
    if (!j["violations"].is_array()) throw InputError("layout: \"violations\" must be an array");
    std::size_t i = 0;
    for (const auto& vj : j["violations"])
      layout.violations.push_back(
          detail::rect_from_json(vj, "violations[" + std::to_string(i++) + "]"));
  }

  validate_layout(layout);
  return layout;
}

inline void write_layout(const Layout& layout, const std::filesystem::path& path) {
  validate_layout(layout);
  nlohmann::json j;
  j["format"] = kLayoutFormatVersion;
  j["die"] = {layout.die.x0, layout.die.y0, layout.die.x1, layout.die.y1};
  j["cells"] = nlohmann::json::array();
  for (const Cell& c : layout.cells)
    j["cells"].push_back({{"id", c.id}, {"rect", {c.rect.x0, c.rect.y0, c.rect.x1, c.rect.y1}}});
  j["pins"] = nlohmann::json::array();
  for (const Pin& p : layout.pins)
    j["pins"].push_back({{"id", p.id},
                         {"cell", p.cell},
                         {"net", p.net},
                         {"rect", {p.rect.x0, p.rect.y0, p.rect.x1, p.rect.y1}}});
  j["violations"] = nlohmann::json::array();
  for (const Rect& v : layout.violations) j["violations"].push_back({v.x0, v.y0, v.x1, v.y1});

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("layout: cannot open \"" + path.string() + "\" for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InputError("layout: write to \"" + path.string() + "\" failed");
}

}  // namespace pgrdrc
