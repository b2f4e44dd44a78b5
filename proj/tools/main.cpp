#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "screenml/csv.hpp"
#include "screenml/experiment.hpp"

namespace fs = std::filesystem;
using namespace screenml;

namespace {

nlohmann::json read_json(const fs::path& path) {
  const auto text = csv::read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void emit(const std::optional<fs::path>& out, const std::string& text) {
  if (out) {
    csv::write_text(*out, text);
  } else {
    std::cout << text;
  }
}

int run_synth(const std::optional<fs::path>& config, const fs::path& out, std::optional<std::uint64_t> seed) {
  auto doc = config ? read_json(*config) : nlohmann::json::object();
  if (doc.contains("data") && doc["data"].contains("synthetic")) doc = doc["data"]["synthetic"];
  if (seed) doc["seed"] = *seed;
  const auto cfg = SynthConfig::from_json(doc);
  for (const auto& p : cmd_synth(cfg, out)) std::cout << p.string() << '\n';
  return 0;
}

int run_experiment_cmd(const fs::path& config, const std::optional<fs::path>& out,
                       std::optional<std::uint64_t> seed) {
  auto doc = read_json(config);
  if (seed) doc["seed"] = *seed;
  if (out) doc["output"] = fs::absolute(*out).string();
  const auto cfg = ExperimentConfig::from_json(doc, config.parent_path());
  const auto res = run_experiment(cfg);

  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : res.failures) {
    std::cerr << "model " << f.name << " [" << f.adjustments << "] failed during " << f.step << ": "
              << f.message << '\n';
  }
  for (const auto& o : res.outcomes) {
    std::cout << o.name << " [" << o.adjustments << "] auc=" << format_number(o.auc)
              << " threshold=" << format_number(o.sweep.best_threshold) << '\n';
  }
  std::cout << "outputs written to " << cfg.output.string() << '\n';
  if (res.outcomes.empty()) return kExitAllModelsFailed;
  return 0;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return default_threshold_grid();
  std::vector<double> grid;
  for (const auto& rec : csv::parse(text)) {
    for (const auto& f : rec.fields) {
      try {
        grid.push_back(std::stod(f));
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidConfig, "bad threshold '" + f + "'");
      }
    }
  }
  return grid;
}

int run_sweep(const fs::path& scores_path, const std::string& grid_text, const std::string& objective,
              const std::optional<fs::path>& out) {
  const auto scored = load_scores(scores_path);
  const auto grid = parse_grid(grid_text);
  const auto sweep = sweep_thresholds(scored.y, scored.scores, grid, ThresholdObjective::parse(objective),
                                      scored.name);
  const double area = roc_auc(scored.y, scored.scores);
  std::vector<MetricsRecord> records;
  for (const auto& row : sweep.rows) records.push_back({row, "", "sweep", "", false, area});
  records.push_back({sweep.rows[sweep.best_index], "", "best", objective, sweep.fallback, area});
  emit(out, metrics_csv(records));
  if (sweep.fallback) std::cerr << "warning: no threshold met the precision floor; using max precision\n";
  return 0;
}

int run_roc(const std::vector<fs::path>& inputs, const std::optional<fs::path>& svg,
            const std::optional<fs::path>& out) {
  std::vector<std::pair<std::string, RocCurve>> curves;
  for (const auto& p : inputs) {
    const auto scored = load_scores(p);
    curves.emplace_back(scored.name, roc_curve(scored.y, scored.scores));
  }
  if (svg) csv::write_text(*svg, roc_svg(curves));
  if (out) {
    for (const auto& [name, curve] : curves) csv::write_text(*out / (name + ".csv"), curve.to_csv());
  } else if (!svg) {
    for (const auto& [name, curve] : curves) {
      if (curves.size() > 1) std::cout << "# " << name << '\n';
      std::cout << curve.to_csv();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular screening classifiers: synthetic data, experiments, reports"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  std::optional<fs::path> config;
  fs::path config_required;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus (data.csv, schema.json, births.csv)");
  synth->add_option("--config", config, "SynthConfig JSON");
  fs::path synth_out = "synthetic";
  synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
  synth->add_option("--seed", seed, "Seed override");

  auto* experiment = app.add_subcommand("experiment", "Train and evaluate the configured model matrix");
  experiment->add_option("--config", config_required, "Experiment JSON")->required();
  experiment->add_option("--out", out, "Output directory override");
  experiment->add_option("--seed", seed, "Master seed override");

  auto* report = app.add_subcommand("report", "Merge metrics CSVs into markdown tables");
  std::vector<fs::path> metrics_inputs;
  report->add_option("metrics", metrics_inputs, "metrics.csv files")->required();
  report->add_option("--out", out, "Write the table to a file");

  auto* sweep = app.add_subcommand("sweep", "Threshold sweep over a label,score CSV");
  fs::path scores_path;
  std::string grid_text;
  std::string objective = "max_f1";
  sweep->add_option("scores", scores_path, "label,score CSV")->required();
  sweep->add_option("--grid", grid_text, "Comma-separated thresholds (default 0.05..0.95)");
  sweep->add_option("--objective", objective, "max_f1 or max_recall_with_precision_floor:<p>")
      ->capture_default_str();
  sweep->add_option("--out", out, "Write the metrics CSV to a file");

  auto* roc = app.add_subcommand("roc", "ROC curves from label,score CSVs");
  std::vector<fs::path> roc_inputs;
  std::optional<fs::path> svg;
  roc->add_option("scores", roc_inputs, "label,score CSV files")->required();
  roc->add_option("--svg", svg, "Write a static SVG plot");
  roc->add_option("--out", out, "Directory for one threshold,fpr,tpr CSV per input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) return run_synth(config, synth_out, seed);
    if (*experiment) return run_experiment_cmd(config_required, out, seed);
    if (*report) {
      emit(out, cmd_report(metrics_inputs));
      return 0;
    }
    if (*sweep) return run_sweep(scores_path, grid_text, objective, out);
    if (*roc) return run_roc(roc_inputs, svg, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
