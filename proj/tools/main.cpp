// Command-line front door: featurize -> fit -> tune -> predict -> evaluate,
// plus synthetic data generation and the split protocol. Stages exchange
// data through CSV/JSON files; every successful run prints a one-line JSON
// manifest as its final stdout line.
//
// Exit codes: 0 success, 1 input error, 2 usage error, 3 internal failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgrdrc/pgrdrc.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool json = false;
  bool quiet = false;
};

class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed) : start_(Clock::now()) {
    j_["command"] = std::move(command);
    j_["seed"] = seed;
    j_["inputs"] = nlohmann::json::array();
    j_["outputs"] = nlohmann::json::array();
    j_["parameters"] = nlohmann::json::object();
  }

  void input(const fs::path& p) { j_["inputs"].push_back(p.string()); }
  void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
  void param(const std::string& key, nlohmann::json value) { j_["parameters"][key] = std::move(value); }

  void emit() {
    const std::chrono::duration<double> elapsed = Clock::now() - start_;
    j_["duration_seconds"] = elapsed.count();
    std::cout << j_.dump() << "\n";
  }

 private:
  nlohmann::json j_;
  Clock::time_point start_;
};

// Loads a dataset, treating a "drv" header column as the label column when
// present.
pgrdrc::Dataset load_csv_auto(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw pgrdrc::InputError("csv: cannot open \"" + path.string() + "\"");
  std::string header;
  if (!std::getline(in, header)) throw pgrdrc::InputError("csv: \"" + path.string() + "\" is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  bool has_drv = false;
  for (const std::string& field : pgrdrc::detail::split_fields(header)) has_drv |= (field == "drv");
  in.close();
  return pgrdrc::load_csv(path, has_drv ? std::optional<std::string>("drv") : std::nullopt);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void cmd_featurize(const GlobalOpts& g, const fs::path& layout_path, int rows, int cols,
                   const fs::path& out) {
  Manifest manifest("featurize", g.seed);
  manifest.input(layout_path);
  manifest.param("rows", rows);
  manifest.param("cols", cols);

  const pgrdrc::Layout layout = pgrdrc::parse_layout(layout_path);
  const pgrdrc::GridSpec grid{rows, cols};
  pgrdrc::Dataset ds = pgrdrc::featurize(layout, grid);
  if (!layout.violations.empty()) ds = pgrdrc::label_grids(layout, grid, ds);
  pgrdrc::save_csv(ds, out);
  manifest.output(out);

  if (!g.quiet)
    std::cout << "featurized " << ds.size() << " grids (" << rows << "x" << cols << ", "
              << (ds.labeled() ? "labeled" : "unlabeled") << ") -> " << out.string() << "\n";
  manifest.emit();
}

void cmd_fit(const GlobalOpts& g, const fs::path& train_path, const fs::path& out) {
  Manifest manifest("fit", g.seed);
  manifest.input(train_path);

  const pgrdrc::Dataset train = load_csv_auto(train_path);
  if (train.labeled()) {
    for (std::size_t i = 0; i < train.size(); ++i)
      if (*train.samples()[i].label == 1)
        throw pgrdrc::InputError("fit: training data must be violation-free, but row " +
                                 std::to_string(i + 2) + " of \"" + train_path.string() + "\" has drv=1");
  }

  const auto t0 = Clock::now();
  const pgrdrc::DensityModel model = pgrdrc::fit(train);
  const std::chrono::duration<double> fit_time = Clock::now() - t0;

  pgrdrc::save_model(model, out);
  manifest.output(out);
  manifest.param("samples", train.size());

  if (!g.quiet) {
    std::cout << "fitted " << model.active_count() << "/" << model.schema.names.size() << " features on "
              << train.size() << " samples in " << fit_time.count() << " s\n";
    for (std::size_t f = 0; f < model.schema.names.size(); ++f) {
      std::cout << "  " << model.schema.names[f] << ": ";
      if (!model.features[f]) {
        std::cout << "dropped (constant)\n";
        continue;
      }
      const pgrdrc::FeatureDensity& fd = *model.features[f];
      std::cout << pgrdrc::transform_name(fd.transform.kind) << " mu=" << fmt17(fd.params.mu)
                << " sigma2=" << fmt17(fd.params.sigma2) << "\n";
    }
  }
  manifest.emit();
}

void cmd_tune(const GlobalOpts& g, const fs::path& model_path, const fs::path& data_path,
              const std::string& objective, const std::optional<fs::path>& out,
              const std::optional<fs::path>& sweep_out) {
  Manifest manifest("tune", g.seed);
  manifest.input(model_path);
  manifest.input(data_path);
  manifest.param("objective", objective);

  const pgrdrc::DensityModel model = pgrdrc::load_model(model_path);
  const pgrdrc::Dataset validation = load_csv_auto(data_path);
  if (!validation.labeled())
    throw pgrdrc::InputError("tune: validation data needs a drv label column");

  const pgrdrc::TuneConfig cfg{pgrdrc::objective_from_name(objective)};
  const pgrdrc::TuneResult result = pgrdrc::tune(model, validation, cfg);
  const fs::path out_path = out.value_or(model_path);
  pgrdrc::save_model(pgrdrc::with_log_epsilon(model, result.log_epsilon), out_path);
  manifest.output(out_path);
  if (sweep_out) {
    pgrdrc::write_sweep_csv(result, *sweep_out);
    manifest.output(*sweep_out);
  }

  if (!g.quiet)
    std::cout << "tuned log_epsilon=" << fmt17(result.log_epsilon) << " (" << objective << "="
              << fmt17(result.objective_value) << ", " << result.sweep.size() << " candidates) -> "
              << out_path.string() << "\n";
  manifest.emit();
}

void cmd_predict(const GlobalOpts& g, const fs::path& model_path, const fs::path& data_path,
                 const fs::path& out) {
  Manifest manifest("predict", g.seed);
  manifest.input(model_path);
  manifest.input(data_path);

  const pgrdrc::DensityModel model = pgrdrc::load_model(model_path);
  if (!model.log_epsilon) throw pgrdrc::InputError("predict: model not tuned (log_epsilon unset)");
  const pgrdrc::Dataset ds = load_csv_auto(data_path);
  const std::vector<double> scores = pgrdrc::score_all(model, ds);

  std::ofstream file(out, std::ios::trunc);
  if (!file) throw pgrdrc::InputError("predict: cannot open \"" + out.string() + "\" for writing");
  file << "grid_id,score,prediction\n";
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int pred = scores[i] < *model.log_epsilon ? 1 : 0;
    flagged += static_cast<std::size_t>(pred);
    file << ds.samples()[i].grid_id << ',' << fmt17(scores[i]) << ',' << pred << '\n';
  }
  if (!file) throw pgrdrc::InputError("predict: write to \"" + out.string() + "\" failed");
  manifest.output(out);

  if (!g.quiet)
    std::cout << "flagged " << flagged << "/" << scores.size() << " samples -> " << out.string() << "\n";
  manifest.emit();
}

void cmd_evaluate(const GlobalOpts& g, const fs::path& model_path, const fs::path& data_path) {
  Manifest manifest("evaluate", g.seed);
  manifest.input(model_path);
  manifest.input(data_path);

  const pgrdrc::DensityModel model = pgrdrc::load_model(model_path);
  const pgrdrc::Dataset ds = load_csv_auto(data_path);
  if (!ds.labeled()) throw pgrdrc::InputError("evaluate: data needs a drv label column");

  const std::vector<int> preds = pgrdrc::predict(model, ds);
  std::vector<int> labels;
  labels.reserve(ds.size());
  for (const pgrdrc::GridSample& s : ds.samples()) labels.push_back(*s.label);
  const pgrdrc::EvalReport rep = pgrdrc::report(pgrdrc::confusion(labels, preds));

  if (!g.quiet) std::cout << pgrdrc::format_report(rep);
  if (g.json) std::cout << pgrdrc::report_json(rep).dump() << "\n";
  manifest.emit();
}

void cmd_synth_tabular(const GlobalOpts& g, std::size_t negatives, std::size_t positives,
                       std::size_t features, double shift, const fs::path& out) {
  Manifest manifest("synth", g.seed);
  manifest.param("mode", "tabular");
  manifest.param("negatives", negatives);
  manifest.param("positives", positives);
  manifest.param("features", features);
  manifest.param("shift", shift);

  pgrdrc::SynthConfig cfg;
  cfg.seed = g.seed;
  cfg.n_negatives = negatives;
  cfg.n_positives = positives;
  cfg.n_features = features;
  cfg.shift_sigmas = shift;
  pgrdrc::save_csv(pgrdrc::generate_tabular(cfg), out);
  manifest.output(out);

  if (!g.quiet)
    std::cout << "generated " << negatives << " negatives + " << positives << " positives -> "
              << out.string() << "\n";
  manifest.emit();
}

void cmd_synth_layout(const GlobalOpts& g, std::int64_t die_w, std::int64_t die_h, int rows, int cols,
                      std::size_t cells, double utilization, std::size_t hotspots, double multiplier,
                      const fs::path& out) {
  Manifest manifest("synth", g.seed);
  manifest.param("mode", "layout");
  manifest.param("die_width", die_w);
  manifest.param("die_height", die_h);
  manifest.param("rows", rows);
  manifest.param("cols", cols);
  manifest.param("cells", cells);
  manifest.param("utilization", utilization);
  manifest.param("hotspots", hotspots);
  manifest.param("pin_multiplier", multiplier);

  pgrdrc::SynthConfig cfg;
  cfg.seed = g.seed;
  cfg.die_width = die_w;
  cfg.die_height = die_h;
  cfg.grid = pgrdrc::GridSpec{rows, cols};
  cfg.cell_count = cells;
  cfg.target_utilization = utilization;
  cfg.hotspot_count = hotspots;
  cfg.hotspot_pin_multiplier = multiplier;
  const pgrdrc::Layout layout = pgrdrc::generate_layout(cfg);
  pgrdrc::write_layout(layout, out);
  manifest.output(out);

  if (!g.quiet)
    std::cout << "generated layout with " << layout.cells.size() << " cells, " << layout.pins.size()
              << " pins, " << layout.violations.size() << " violations -> " << out.string() << "\n";
  manifest.emit();
}

void cmd_split(const GlobalOpts& g, const fs::path& data_path, const std::string& out_prefix) {
  Manifest manifest("split", g.seed);
  manifest.input(data_path);
  manifest.param("out_prefix", out_prefix);

  const pgrdrc::Dataset ds = load_csv_auto(data_path);
  const pgrdrc::SplitResult parts = pgrdrc::split(ds, g.seed);
  const fs::path train = out_prefix + "train.csv";
  const fs::path validation = out_prefix + "validation.csv";
  const fs::path test = out_prefix + "test.csv";
  pgrdrc::save_csv(parts.train, train);
  pgrdrc::save_csv(parts.validation, validation);
  pgrdrc::save_csv(parts.test, test);
  manifest.output(train);
  manifest.output(validation);
  manifest.output(test);

  if (!g.quiet)
    std::cout << "split " << ds.size() << " samples -> train " << parts.train.size() << ", validation "
              << parts.validation.size() << ", test " << parts.test.size() << "\n";
  manifest.emit();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pgrdrc: pre-global-routing DRC hotspot prediction via per-feature Gaussian density"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for stochastic commands (synth, split)")->capture_default_str();
  app.add_flag("--json", g.json, "emit machine-readable reports");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  // featurize
  auto* featurize = app.add_subcommand("featurize", "grid a layout file into a feature CSV");
  fs::path fz_layout, fz_out;
  int fz_rows = 0, fz_cols = 0;
  featurize->add_option("--layout", fz_layout, "layout JSON file")->required();
  featurize->add_option("--rows", fz_rows, "grid rows")->required()->check(CLI::PositiveNumber);
  featurize->add_option("--cols", fz_cols, "grid columns")->required()->check(CLI::PositiveNumber);
  featurize->add_option("--out", fz_out, "output CSV")->required();
  featurize->callback([&] { cmd_featurize(g, fz_layout, fz_rows, fz_cols, fz_out); });

  // fit
  auto* fit = app.add_subcommand("fit", "fit the density model on violation-free data");
  fs::path fit_train, fit_out;
  fit->add_option("--train", fit_train, "training CSV (violation-free)")->required();
  fit->add_option("--out", fit_out, "output model JSON")->required();
  fit->callback([&] { cmd_fit(g, fit_train, fit_out); });

  // tune
  auto* tune = app.add_subcommand("tune", "select the decision threshold on labeled validation data");
  fs::path tn_model, tn_data;
  std::string tn_objective = "f1";
  std::optional<fs::path> tn_out, tn_sweep;
  tune->add_option("--model", tn_model, "fitted model JSON")->required();
  tune->add_option("--data", tn_data, "labeled validation CSV")->required();
  tune->add_option("--objective", tn_objective, "tuning objective")
      ->check(CLI::IsMember({"f1", "accuracy"}))
      ->capture_default_str();
  tune->add_option("--out", tn_out, "output model JSON (default: overwrite --model)");
  tune->add_option("--sweep-out", tn_sweep, "write per-candidate sweep diagnostics CSV");
  tune->callback([&] { cmd_tune(g, tn_model, tn_data, tn_objective, tn_out, tn_sweep); });

  // predict
  auto* predict = app.add_subcommand("predict", "score samples and flag predicted violations");
  fs::path pr_model, pr_data, pr_out;
  predict->add_option("--model", pr_model, "tuned model JSON")->required();
  predict->add_option("--data", pr_data, "input CSV")->required();
  predict->add_option("--out", pr_out, "output predictions CSV")->required();
  predict->callback([&] { cmd_predict(g, pr_model, pr_data, pr_out); });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score labeled data and report metrics");
  fs::path ev_model, ev_data;
  evaluate->add_option("--model", ev_model, "tuned model JSON")->required();
  evaluate->add_option("--data", ev_data, "labeled CSV")->required();
  evaluate->callback([&] { cmd_evaluate(g, ev_model, ev_data); });

  // synth
  auto* synth = app.add_subcommand("synth", "generate seeded synthetic data with known ground truth");
  std::string sy_mode;
  std::size_t sy_neg = 1000, sy_pos = 0, sy_feat = 8, sy_cells = 200, sy_hotspots = 0;
  double sy_shift = 6.0, sy_util = 0.5, sy_mult = 3.0;
  std::int64_t sy_die_w = 100000, sy_die_h = 100000;
  int sy_rows = 4, sy_cols = 4;
  fs::path sy_out;
  synth->add_option("--mode", sy_mode, "tabular or layout")
      ->required()
      ->check(CLI::IsMember({"tabular", "layout"}));
  synth->add_option("--out", sy_out, "output file (CSV for tabular, JSON for layout)")->required();
  synth->add_option("--negatives", sy_neg, "tabular: violation-free sample count")->capture_default_str();
  synth->add_option("--positives", sy_pos, "tabular: anomalous sample count")->capture_default_str();
  synth->add_option("--features", sy_feat, "tabular: feature count")->capture_default_str();
  synth->add_option("--shift", sy_shift, "tabular: anomaly displacement in sigma units")
      ->capture_default_str();
  synth->add_option("--die-width", sy_die_w, "layout: die width in nm")->capture_default_str();
  synth->add_option("--die-height", sy_die_h, "layout: die height in nm")->capture_default_str();
  synth->add_option("--rows", sy_rows, "layout: grid rows")->capture_default_str();
  synth->add_option("--cols", sy_cols, "layout: grid columns")->capture_default_str();
  synth->add_option("--cells", sy_cells, "layout: cell count")->capture_default_str();
  synth->add_option("--utilization", sy_util, "layout: target utilization in (0,1)")
      ->capture_default_str();
  synth->add_option("--hotspots", sy_hotspots, "layout: violation hotspot count")->capture_default_str();
  synth->add_option("--pin-multiplier", sy_mult, "layout: hotspot pin-density multiplier (> 1)")
      ->capture_default_str();
  synth->callback([&] {
    if (sy_mode == "tabular")
      cmd_synth_tabular(g, sy_neg, sy_pos, sy_feat, sy_shift, sy_out);
    else
      cmd_synth_layout(g, sy_die_w, sy_die_h, sy_rows, sy_cols, sy_cells, sy_util, sy_hotspots, sy_mult,
                       sy_out);
  });

  // split
  auto* split = app.add_subcommand("split", "split a labeled CSV into train/validation/test");
  fs::path sp_data;
  std::string sp_prefix;
  split->add_option("--data", sp_data, "labeled CSV")->required();
  split->add_option("--out-prefix", sp_prefix, "prefix for train/validation/test CSVs")->required();
  split->callback([&] { cmd_split(g, sp_data, sp_prefix); });

  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const pgrdrc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
