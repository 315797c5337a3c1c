#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgrdrc/error.hpp"

namespace pgrdrc {

// Monotone per-feature transforms that pull a skewed violation-free marginal
// toward a bell shape before Gaussian fitting.
enum class TransformKind { identity, sqrt, log1p, log_offset };

struct TransformSpec {
  TransformKind kind = TransformKind::identity;
  double offset = 0.0;  // log_offset only: ln(x + offset)

  bool operator==(const TransformSpec&) const = default;
};

struct FittedTransform {
  TransformSpec spec;
  bool degenerate = false;  // constant feature; caller should drop it
};

inline const char* transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::sqrt: return "sqrt";
    case TransformKind::log1p: return "log1p";
    case TransformKind::log_offset: return "log_offset";
  }
  throw std::logic_error("transform_name: unknown kind");
}

inline TransformKind transform_kind_from_name(const std::string& name) {
  if (name == "identity") return TransformKind::identity;
  if (name == "sqrt") return TransformKind::sqrt;
  if (name == "log1p") return TransformKind::log1p;
  if (name == "log_offset") return TransformKind::log_offset;
  throw InputError("unknown transform kind \"" + name + "\"");
}

inline nlohmann::json transform_to_json(const TransformSpec& spec) {
  nlohmann::json j{{"kind", transform_name(spec.kind)}};
  if (spec.kind == TransformKind::log_offset) j["offset"] = spec.offset;
  return j;
}

inline TransformSpec transform_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InputError("transform: expected an object with a \"kind\" string");
  TransformSpec spec;
  spec.kind = transform_kind_from_name(j["kind"].get<std::string>());
  if (spec.kind == TransformKind::log_offset) {
    if (!j.contains("offset") || !j["offset"].is_number())
      throw InputError("transform: log_offset requires a numeric \"offset\"");
    spec.offset = j["offset"].get<double>();
    if (!std::isfinite(spec.offset)) throw InputError("transform: non-finite offset");
  }
  return spec;
}

inline double apply(const TransformSpec& spec, double x) {
  switch (spec.kind) {
    case TransformKind::identity:
      return x;
    case TransformKind::sqrt:
      if (x < 0.0) throw InputError("transform: sqrt of negative value " + std::to_string(x));
      return std::sqrt(x);
    case TransformKind::log1p:
      if (x <= -1.0) throw InputError("transform: log1p domain violation at " + std::to_string(x));
      return std::log1p(x);
    case TransformKind::log_offset:
      if (x + spec.offset <= 0.0)
        throw InputError("transform: log_offset domain violation at " + std::to_string(x));
      return std::log(x + spec.offset);
  }
  throw std::logic_error("apply: unknown transform kind");
}

inline std::vector<double> apply_all(const TransformSpec& spec, std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(apply(spec, v));
  return out;
}

// Adjusted Fisher-Pearson sample skewness: g1 * sqrt(n(n-1)) / (n-2).
inline double skewness(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw InputError("skewness: need at least 3 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  if (m2 == 0.0) throw InputError("skewness: zero variance");
  const double g1 = m3 / std::pow(m2, 1.5);
  const double nd = static_cast<double>(n);
  return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
}

// Picks the candidate transform minimizing |skewness| of the transformed
// values. Candidates, in tie-break order: identity; sqrt and log1p when all
// values are non-negative; ln(x + c) with a data-driven c keeping arguments
// positive. Candidates whose transformed values are non-finite or constant
// are skipped; identity always survives.
inline FittedTransform fit_transform(std::span<const double> values) {
  if (values.size() < 3) throw InputError("fit_transform: need at least 3 values");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it, hi = *max_it;
  if (lo == hi) return FittedTransform{TransformSpec{TransformKind::identity, 0.0}, true};

  std::vector<TransformSpec> candidates;
  candidates.push_back({TransformKind::identity, 0.0});
  if (lo >= 0.0) {
    candidates.push_back({TransformKind::sqrt, 0.0});
    candidates.push_back({TransformKind::log1p, 0.0});
  }
  candidates.push_back({TransformKind::log_offset, 1e-6 * (hi - lo) - lo});

  bool have_best = false;
  TransformSpec best;
  double best_abs_skew = 0.0;
  for (const TransformSpec& cand : candidates) {
    std::vector<double> transformed;
    try {
      transformed = apply_all(cand, values);
    } catch (const InputError&) {
      continue;
    }
    bool finite = true;
    for (double t : transformed) finite &= std::isfinite(t);
    if (!finite) continue;
    double abs_skew;
    try {
      abs_skew = std::abs(skewness(transformed));
    } catch (const InputError&) {
      continue;  // transform collapsed the spread
    }
    if (!std::isfinite(abs_skew)) continue;  // moment overflow on extreme magnitudes
    if (!have_best || abs_skew < best_abs_skew) {
      have_best = true;
      best = cand;
      best_abs_skew = abs_skew;
    }
  }
  if (!have_best) return FittedTransform{TransformSpec{TransformKind::identity, 0.0}, false};
  return FittedTransform{best, false};
}

}  // namespace pgrdrc
