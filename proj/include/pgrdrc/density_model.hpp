#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pgrdrc/dataset.hpp"
#include "pgrdrc/error.hpp"
#include "pgrdrc/gaussianize.hpp"

namespace pgrdrc {

inline constexpr double kSigma2Floor = 1e-12;
inline constexpr std::string_view kModelFormatVersion = "pgrdrc-model-v1";

struct GaussianParams {
  double mu = 0.0;
  double sigma2 = 1.0;  // >= kSigma2Floor once fitted

  bool operator==(const GaussianParams&) const = default;
};

// Single-feature normal PDF. Strictly positive over the double range that
// keeps the exponent above the underflow threshold.
inline double pdf_single(double x, const GaussianParams& p) {
  const double d = x - p.mu;
  return std::exp(-d * d / (2.0 * p.sigma2)) / std::sqrt(2.0 * std::numbers::pi * p.sigma2);
}

struct FeatureDensity {
  TransformSpec transform;
  GaussianParams params;

  bool operator==(const FeatureDensity&) const = default;
};

// Natural-log joint density of a sample under the factorized model.
struct Score {
  double value = 0.0;
};

// Per-feature (transform, mu, sigma2) fitted on violation-free data, plus the
// log-domain decision threshold once tuned. Immutable in practice: fit and
// load_model construct it, with_log_epsilon copies it.
struct DensityModel {
  FeatureSchema schema;
  // Aligned with schema; nullopt marks a degenerate feature dropped at fit time.
  std::vector<std::optional<FeatureDensity>> features;
  std::optional<double> log_epsilon;

  std::size_t active_count() const {
    std::size_t n = 0;
    for (const auto& f : features) n += f.has_value() ? 1 : 0;
    return n;
  }

  bool fitted() const { return !features.empty() && active_count() > 0; }

  std::vector<std::string> dropped_features() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < features.size(); ++i)
      if (!features[i]) out.push_back(schema.names[i]);
    return out;
  }

  bool operator==(const DensityModel&) const = default;
};

// Fits one Gaussian per feature on transformed values: mu = sample mean,
// sigma2 = population (divide-by-N) variance floored at kSigma2Floor.
// Constant features are dropped rather than fitted with zero variance.
inline DensityModel fit(const Dataset& train) {
  if (train.labeled()) {
    for (std::size_t i = 0; i < train.size(); ++i)
      if (*train.samples()[i].label == 1)
        throw InputError("fit: training data contains a positive-labeled sample at index " + std::to_string(i));
  }
  if (train.size() < 3) throw InputError("fit: need at least 3 training samples");

  DensityModel model;
  model.schema = train.schema();
  model.features.resize(train.feature_count());
  for (std::size_t f = 0; f < train.feature_count(); ++f) {
    const std::vector<double> raw = train.column(f);
    const FittedTransform fitted = fit_transform(raw);
    if (fitted.degenerate) continue;  // dropped
    const std::vector<double> t = apply_all(fitted.spec, raw);
    const double n = static_cast<double>(t.size());
    double mean = 0.0;
    for (double v : t) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : t) var += (v - mean) * (v - mean);
    var /= n;
    model.features[f] = FeatureDensity{fitted.spec, GaussianParams{mean, std::max(var, kSigma2Floor)}};
  }
  if (model.active_count() == 0) throw InputError("fit: every feature is degenerate");
  return model;
}

// ln of the factorized joint PDF, with each factor summed in log form; the
// naive product underflows once the exponents total ~-745.
inline Score log_density(const DensityModel& model, const GridSample& sample) {
  if (!model.fitted()) throw InputError("log_density: model is not fitted");
  if (sample.values.size() != model.schema.names.size())
    throw InputError("log_density: sample has " + std::to_string(sample.values.size()) +
                     " values, model schema has " + std::to_string(model.schema.names.size()));
  double sum = 0.0;
  for (std::size_t f = 0; f < model.features.size(); ++f) {
    if (!model.features[f]) continue;
    const FeatureDensity& fd = *model.features[f];
    const double t = apply(fd.transform, sample.values[f]);
    const double d = t - fd.params.mu;
    sum += -0.5 * std::log(2.0 * std::numbers::pi * fd.params.sigma2) - d * d / (2.0 * fd.params.sigma2);
  }
  return Score{sum};
}

inline std::vector<double> score_all(const DensityModel& model, const Dataset& ds) {
  if (ds.schema() != model.schema) throw InputError("score: dataset schema does not match model schema");
  std::vector<double> scores;
  scores.reserve(ds.size());
  for (const GridSample& s : ds.samples()) scores.push_back(log_density(model, s).value);
  return scores;
}

// Decision rule: flag as violation iff score < log_epsilon (strict).
inline std::vector<int> predict(const DensityModel& model, const Dataset& ds) {
  if (!model.log_epsilon) throw InputError("predict: model not tuned (log_epsilon unset)");
  const double eps = *model.log_epsilon;
  const std::vector<double> scores = score_all(model, ds);
  std::vector<int> preds;
  preds.reserve(scores.size());
  for (double s : scores) preds.push_back(s < eps ? 1 : 0);
  return preds;
}

inline DensityModel with_log_epsilon(DensityModel model, double log_epsilon) {
  if (!std::isfinite(log_epsilon)) throw InputError("with_log_epsilon: threshold must be finite");
  model.log_epsilon = log_epsilon;
  return model;
}

inline void save_model(const DensityModel& model, const std::filesystem::path& path) {
  if (!model.fitted()) throw InputError("save_model: model is not fitted");
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["schema"] = model.schema.names;
  j["dropped"] = model.dropped_features();
  nlohmann::json features = nlohmann::json::object();
  for (std::size_t f = 0; f < model.features.size(); ++f) {
    if (!model.features[f]) continue;
    const FeatureDensity& fd = *model.features[f];
    features[model.schema.names[f]] = {
        {"transform", transform_to_json(fd.transform)}, {"mu", fd.params.mu}, {"sigma2", fd.params.sigma2}};
  }
  j["features"] = std::move(features);
  j["log_epsilon"] = model.log_epsilon ? nlohmann::json(*model.log_epsilon) : nlohmann::json(nullptr);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("model: cannot open \"" + path.string() + "\" for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InputError("model: write to \"" + path.string() + "\" failed");
}

inline DensityModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("model: cannot open \"" + path.string() + "\"");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("model: \"" + path.string() + "\" is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InputError("model: top-level JSON value must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "format_version" && key != "schema" && key != "dropped" && key != "features" &&
        key != "log_epsilon")
      throw InputError("model: unknown key \"" + key + "\"");
  if (!j.contains("format_version") || !j["format_version"].is_string() ||
      j["format_version"].get<std::string>() != kModelFormatVersion)
    throw InputError("model: unsupported format_version (expected \"" + std::string(kModelFormatVersion) + "\")");
  if (!j.contains("schema") || !j["schema"].is_array()) throw InputError("model: missing \"schema\" array");
  if (!j.contains("dropped") || !j["dropped"].is_array()) throw InputError("model: missing \"dropped\" array");
  if (!j.contains("features") || !j["features"].is_object())
    throw InputError("model: missing \"features\" object");
  if (!j.contains("log_epsilon")) throw InputError("model: missing \"log_epsilon\"");

  DensityModel model;
  for (const auto& name : j["schema"]) {
    if (!name.is_string()) throw InputError("model: schema entries must be strings");
    model.schema.names.push_back(name.get<std::string>());
  }
  validate_schema(model.schema);

  std::unordered_set<std::string> dropped;
  for (const auto& name : j["dropped"]) {
    if (!name.is_string()) throw InputError("model: dropped entries must be strings");
    dropped.insert(name.get<std::string>());
  }

  const nlohmann::json& features = j["features"];
  model.features.resize(model.schema.names.size());
  std::size_t consumed = 0;
  for (std::size_t f = 0; f < model.schema.names.size(); ++f) {
    const std::string& name = model.schema.names[f];
    if (dropped.count(name)) {
      if (features.contains(name))
        throw InputError("model: feature \"" + name + "\" is both dropped and parameterized");
      continue;
    }
    if (!features.contains(name))
      throw InputError("model: schema feature \"" + name + "\" has no parameters and is not dropped");
    const nlohmann::json& fj = features[name];
    if (!fj.is_object() || !fj.contains("transform") || !fj.contains("mu") || !fj.contains("sigma2") ||
        !fj["mu"].is_number() || !fj["sigma2"].is_number())
      throw InputError("model: feature \"" + name + "\" must carry transform, mu, sigma2");
    FeatureDensity fd;
    fd.transform = transform_from_json(fj["transform"]);
    fd.params.mu = fj["mu"].get<double>();
    fd.params.sigma2 = fj["sigma2"].get<double>();
    if (!std::isfinite(fd.params.mu)) throw InputError("model: feature \"" + name + "\" has non-finite mu");
    if (!std::isfinite(fd.params.sigma2) || fd.params.sigma2 < kSigma2Floor)
      throw InputError("model: feature \"" + name + "\" has sigma2 below the " +
                       std::to_string(kSigma2Floor) + " floor");
    model.features[f] = fd;
    ++consumed;
  }
  if (consumed != features.size())
    throw InputError("model: \"features\" contains entries outside the schema");
  if (model.active_count() == 0) throw InputError("model: no active features");

  const nlohmann::json& eps = j["log_epsilon"];
  if (eps.is_null()) {
    model.log_epsilon = std::nullopt;
  } else if (eps.is_number()) {
    model.log_epsilon = eps.get<double>();
    if (!std::isfinite(*model.log_epsilon)) throw InputError("model: non-finite log_epsilon");
  } else {
    throw InputError("model: log_epsilon must be a number or null");
  }
  return model;
}

}  // namespace pgrdrc
