#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pgrdrc/error.hpp"

namespace pgrdrc {

// Positive class = DRC violation (label 1).
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> preds) {
  if (labels.empty()) throw InputError("confusion: empty input");
  if (labels.size() != preds.size())
    throw InputError("confusion: " + std::to_string(labels.size()) + " labels vs " +
                     std::to_string(preds.size()) + " predictions");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] != 0 && labels[i] != 1) || (preds[i] != 0 && preds[i] != 1))
      throw InputError("confusion: entry " + std::to_string(i) + " outside {0,1}");
    if (labels[i] == 1)
      preds[i] == 1 ? ++m.tp : ++m.fn;
    else
      preds[i] == 1 ? ++m.fp : ++m.tn;
  }
  return m;
}

// Metrics are nullopt when their ratio is 0/0; rendered as "n/a", never NaN.
struct EvalReport {
  ConfusionMatrix matrix;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> accuracy;
  std::optional<double> f1;
};

inline EvalReport report(const ConfusionMatrix& m) {
  EvalReport r;
  r.matrix = m;
  auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(m.tp, m.tp + m.fp);
  r.recall = ratio(m.tp, m.tp + m.fn);
  r.accuracy = ratio(m.tp + m.tn, m.total());
  if (r.precision && r.recall) {
    const double p = *r.precision, q = *r.recall;
    if (p + q > 0.0) r.f1 = 2.0 * p * q / (p + q);
  }
  return r;
}

inline std::string format_metric(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << *v;
  return os.str();
}

inline std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  os << "confusion matrix (positive = violation)\n"
     << "  tp=" << r.matrix.tp << " fp=" << r.matrix.fp << " fn=" << r.matrix.fn << " tn=" << r.matrix.tn << "\n"
     << "  precision " << format_metric(r.precision) << "\n"
     << "  recall    " << format_metric(r.recall) << "\n"
     << "  accuracy  " << format_metric(r.accuracy) << "\n"
     << "  f1        " << format_metric(r.f1) << "\n";
  return os.str();
}

inline nlohmann::json report_json(const EvalReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (!v) return nullptr;
    return *v;
  };
  return nlohmann::json{{"tp", r.matrix.tp},     {"fp", r.matrix.fp},
                        {"fn", r.matrix.fn},     {"tn", r.matrix.tn},
                        {"precision", opt(r.precision)}, {"recall", opt(r.recall)},
                        {"accuracy", opt(r.accuracy)},   {"f1", opt(r.f1)}};
}

}  // namespace pgrdrc
