#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pgrdrc/error.hpp"
#include "pgrdrc/rng.hpp"

namespace pgrdrc {

struct FeatureSchema {
  std::vector<std::string> names;

  bool operator==(const FeatureSchema&) const = default;
};

inline void validate_schema(const FeatureSchema& schema) {
  std::unordered_set<std::string_view> seen;
  for (const auto& name : schema.names) {
    if (name.empty()) throw InputError("schema: feature name must be non-empty");
    if (!seen.insert(name).second) throw InputError("schema: duplicate feature name \"" + name + "\"");
  }
}

// One feature vector per virtual grid. label: 0 = violation-free, 1 = violation.
struct GridSample {
  std::vector<double> values;
  std::optional<int> label;
  std::string grid_id;  // empty when untagged

  bool operator==(const GridSample&) const = default;
};

// Immutable after construction; all samples labeled or all unlabeled.
class Dataset {
 public:
  Dataset() = default;

  Dataset(FeatureSchema schema, std::vector<GridSample> samples)
      : schema_(std::move(schema)), samples_(std::move(samples)) {
    validate_schema(schema_);
    bool any_labeled = false, any_unlabeled = false;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const GridSample& s = samples_[i];
      if (s.values.size() != schema_.names.size())
        throw InputError("dataset: sample " + std::to_string(i) + " has " + std::to_string(s.values.size()) +
                         " values, schema has " + std::to_string(schema_.names.size()));
      for (double v : s.values)
        if (!std::isfinite(v))
          throw InputError("dataset: sample " + std::to_string(i) + " contains a non-finite value");
      if (s.label) {
        if (*s.label != 0 && *s.label != 1)
          throw InputError("dataset: sample " + std::to_string(i) + " has label outside {0,1}");
        any_labeled = true;
      } else {
        any_unlabeled = true;
      }
    }
    if (any_labeled && any_unlabeled)
      throw InputError("dataset: mixed labeled and unlabeled samples");
    labeled_ = any_labeled;
  }

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<GridSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t feature_count() const { return schema_.names.size(); }
  bool labeled() const { return labeled_; }

  std::vector<double> column(std::size_t feature_idx) const {
    if (feature_idx >= schema_.names.size()) throw std::logic_error("dataset: feature index out of range");
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const GridSample& s : samples_) out.push_back(s.values[feature_idx]);
    return out;
  }

  std::size_t count_label(int label) const {
    std::size_t n = 0;
    for (const GridSample& s : samples_) n += (s.label && *s.label == label) ? 1 : 0;
    return n;
  }

  bool operator==(const Dataset&) const = default;

 private:
  FeatureSchema schema_;
  std::vector<GridSample> samples_;
  bool labeled_ = false;
};

struct SplitResult {
  Dataset train;       // negatives only
  Dataset validation;  // labeled
  Dataset test;        // labeled
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_double(const std::string& cell, std::size_t file_row, const std::string& col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw InputError("csv: row " + std::to_string(file_row) + ", column \"" + col + "\": cannot parse \"" + cell +
                     "\" as a number");
  if (!std::isfinite(value))
    throw InputError("csv: row " + std::to_string(file_row) + ", column \"" + col + "\": non-finite value");
  return value;
}

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// CSV layout: header row; optional "grid_id" column (opaque tag); feature
// columns in schema order; optional label column with values in {0,1}.
inline Dataset load_csv(const std::filesystem::path& path,
                        const std::optional<std::string>& label_column = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw InputError("csv: cannot open \"" + path.string() + "\"");

  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: \"" + path.string() + "\" is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = detail::split_fields(line);
  std::optional<std::size_t> id_col, label_col;
  FeatureSchema schema;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "grid_id" && !id_col) {
      id_col = c;
    } else if (label_column && header[c] == *label_column) {
      if (label_col) throw InputError("csv: duplicate label column \"" + *label_column + "\"");
      label_col = c;
    } else {
      schema.names.push_back(header[c]);
      feature_cols.push_back(c);
    }
  }
  if (label_column && !label_col)
    throw InputError("csv: label column \"" + *label_column + "\" not found in header");
  validate_schema(schema);

  std::vector<GridSample> samples;
  std::size_t file_row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++file_row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_fields(line);
    if (fields.size() != header.size())
      throw InputError("csv: row " + std::to_string(file_row) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    GridSample s;
    s.values.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k)
      s.values.push_back(detail::parse_double(fields[feature_cols[k]], file_row, schema.names[k]));
    if (id_col) s.grid_id = fields[*id_col];
    if (label_col) {
      const double raw = detail::parse_double(fields[*label_col], file_row, *label_column);
      if (raw != 0.0 && raw != 1.0)
        throw InputError("csv: row " + std::to_string(file_row) + ": label \"" + fields[*label_col] +
                         "\" outside {0,1}");
      s.label = static_cast<int>(raw);
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw InputError("csv: \"" + path.string() + "\" has no data rows");
  return Dataset(std::move(schema), std::move(samples));
}

// Values are written with 17 significant digits so load_csv(save_csv(ds))
// reproduces ds bit-exactly. Labels land in a trailing "drv" column.
inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  if (ds.size() == 0) throw InputError("csv: refusing to save a dataset with no samples");
  bool any_id = false;
  for (const GridSample& s : ds.samples()) any_id |= !s.grid_id.empty();

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("csv: cannot open \"" + path.string() + "\" for writing");

  if (any_id) out << "grid_id,";
  for (std::size_t i = 0; i < ds.schema().names.size(); ++i) {
    if (i) out << ',';
    out << ds.schema().names[i];
  }
  if (ds.labeled()) out << ",drv";
  out << '\n';

  for (const GridSample& s : ds.samples()) {
    if (any_id) out << s.grid_id << ',';
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i) out << ',';
      out << detail::format_value(s.values[i]);
    }
    if (ds.labeled()) out << ',' << *s.label;
    out << '\n';
  }
  if (!out) throw InputError("csv: write to \"" + path.string() + "\" failed");
}

// Negatives are shuffled and partitioned 70/15/15 (train/validation/test),
// positives 30/70 (validation/test). Earlier partitions take the floor of
// their fraction; the remainder goes to test. Deterministic per seed.
inline SplitResult split(const Dataset& ds, std::uint64_t seed) {
  if (!ds.labeled()) throw InputError("split: dataset must be fully labeled");
  std::vector<std::size_t> negatives, positives;
  for (std::size_t i = 0; i < ds.size(); ++i)
    (*ds.samples()[i].label == 1 ? positives : negatives).push_back(i);
  if (negatives.empty()) throw InputError("split: dataset has no negative samples");

  Rng rng(seed);
  rng.shuffle(negatives);
  rng.shuffle(positives);

  const std::size_t n = negatives.size();
  const std::size_t n_train = n * 7 / 10;
  const std::size_t n_val = n * 3 / 20;
  const std::size_t p = positives.size();
  const std::size_t p_val = p * 3 / 10;

  auto take = [&ds](const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                    std::vector<GridSample>& out) {
    for (std::size_t k = begin; k < end; ++k) out.push_back(ds.samples()[idx[k]]);
  };

  std::vector<GridSample> train, validation, test;
  take(negatives, 0, n_train, train);
  take(negatives, n_train, n_train + n_val, validation);
  take(positives, 0, p_val, validation);
  take(negatives, n_train + n_val, n, test);
  take(positives, p_val, p, test);

  return SplitResult{Dataset(ds.schema(), std::move(train)), Dataset(ds.schema(), std::move(validation)),
                     Dataset(ds.schema(), std::move(test))};
}

}  // namespace pgrdrc
