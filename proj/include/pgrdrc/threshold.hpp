#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "pgrdrc/dataset.hpp"
#include "pgrdrc/density_model.hpp"
#include "pgrdrc/error.hpp"
#include "pgrdrc/metrics.hpp"

namespace pgrdrc {

enum class Objective { f1, accuracy };

// f1 is the default: on ~1%-positive data, accuracy is maximized by flagging
// nothing, which defeats the point of hotspot screening.
struct TuneConfig {
  Objective objective = Objective::f1;
};

inline const char* objective_name(Objective o) {
  return o == Objective::f1 ? "f1" : "accuracy";
}

inline Objective objective_from_name(const std::string& name) {
  if (name == "f1") return Objective::f1;
  if (name == "accuracy") return Objective::accuracy;
  throw InputError("unknown objective \"" + name + "\" (expected f1 or accuracy)");
}

struct SweepPoint {
  double candidate = 0.0;
  ConfusionMatrix matrix;
  double objective = 0.0;
};

struct TuneResult {
  double log_epsilon = 0.0;
  double objective_value = 0.0;      // max over sweep; log_epsilon attains it
  std::vector<SweepPoint> sweep;     // ascending by candidate
};

// Midpoints of adjacent sorted unique scores plus one open-end candidate on
// each side: k unique scores yield k+1 candidates, covering every achievable
// confusion matrix.
inline std::vector<double> candidates(std::span<const double> scores) {
  if (scores.empty()) throw InputError("candidates: empty score vector");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out;
  out.reserve(sorted.size() + 1);
  out.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) out.push_back((sorted[i] + sorted[i + 1]) / 2.0);
  out.push_back(sorted.back() + 1.0);
  return out;
}

namespace detail {

// Undefined (0/0) objectives rank as 0 for the sweep; the marker stays
// visible in the per-candidate confusion matrix.
inline double objective_value(const ConfusionMatrix& m, Objective o) {
  const EvalReport r = report(m);
  const std::optional<double> v = (o == Objective::f1) ? r.f1 : r.accuracy;
  return v.value_or(0.0);
}

}  // namespace detail

// Exhaustive sweep over candidate thresholds with the decision rule
// score < threshold. Ties break toward higher recall, then lower threshold.
inline TuneResult tune_scores(std::span<const double> scores, std::span<const int> labels,
                              const TuneConfig& cfg = {}) {
  if (scores.size() != labels.size())
    throw InputError("tune: " + std::to_string(scores.size()) + " scores vs " + std::to_string(labels.size()) +
                     " labels");
  bool any_pos = false, any_neg = false;
  for (int l : labels) {
    if (l != 0 && l != 1) throw InputError("tune: labels must be in {0,1}");
    (l == 1 ? any_pos : any_neg) = true;
  }
  if (!any_pos || !any_neg) throw InputError("tune: validation data must contain both classes");

  TuneResult result;
  bool have_best = false;
  double best_recall = 0.0;
  for (double cand : candidates(scores)) {
    ConfusionMatrix m;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool flagged = scores[i] < cand;
      if (labels[i] == 1)
        flagged ? ++m.tp : ++m.fn;
      else
        flagged ? ++m.fp : ++m.tn;
    }
    const double value = detail::objective_value(m, cfg.objective);
    result.sweep.push_back(SweepPoint{cand, m, value});
    const double recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    // Candidates ascend, so keeping the first best yields the lowest threshold.
    if (!have_best || value > result.objective_value ||
        (value == result.objective_value && recall > best_recall)) {
      have_best = true;
      result.objective_value = value;
      result.log_epsilon = cand;
      best_recall = recall;
    }
  }
  return result;
}

inline TuneResult tune(const DensityModel& model, const Dataset& validation, const TuneConfig& cfg = {}) {
  if (!model.fitted()) throw InputError("tune: model is not fitted");
  if (!validation.labeled()) throw InputError("tune: validation data must be labeled");
  const std::vector<double> scores = score_all(model, validation);
  std::vector<int> labels;
  labels.reserve(validation.size());
  for (const GridSample& s : validation.samples()) labels.push_back(*s.label);
  return tune_scores(scores, labels, cfg);
}

// Diagnostics CSV for external plotting.
inline void write_sweep_csv(const TuneResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("sweep: cannot open \"" + path.string() + "\" for writing");
  out << "candidate,tp,fp,fn,tn,objective\n";
  char buf[64];
  for (const SweepPoint& p : result.sweep) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.candidate);
    out << buf << ',' << p.matrix.tp << ',' << p.matrix.fp << ',' << p.matrix.fn << ',' << p.matrix.tn << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", p.objective);
    out << buf << '\n';
  }
  if (!out) throw InputError("sweep: write to \"" + path.string() + "\" failed");
}

}  // namespace pgrdrc
