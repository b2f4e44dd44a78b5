#include "screenml/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include "screenml/csv.hpp"
#include "screenml/features.hpp"
#include "screenml/random.hpp"

#ifndef SCREENML_VERSION
#define SCREENML_VERSION "0.0.0"
#endif

namespace screenml {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view toolkit_version() { return SCREENML_VERSION; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::EmptyGrid:
    case ErrorCode::InvalidRatio:
    case ErrorCode::UnknownFormatVersion:
    case ErrorCode::IoError:
      return kExitConfig;
    default:
      return kExitData;
  }
}

namespace {

void expect_keys(const json& doc, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + std::string(what));
    }
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc, const fs::path& base_dir) {
  expect_keys(doc, {"data", "segment", "births", "split", "resample", "models", "thresholds", "cv",
                    "grid", "output", "seed"},
              "experiment config");
  ExperimentConfig cfg;
  try {
    if (!doc.contains("seed")) throw Error(ErrorCode::InvalidConfig, "experiment config needs a master 'seed'");
    cfg.seed = doc.at("seed").get<std::uint64_t>();

    const auto& data = doc.at("data");
    expect_keys(data, {"synthetic", "csv", "schema"}, "data");
    if (data.contains("synthetic")) {
      if (data.contains("csv")) throw Error(ErrorCode::InvalidConfig, "data takes either 'synthetic' or 'csv'");
      cfg.synthetic = SynthConfig::from_json(data["synthetic"]);
      cfg.synthetic_seed_given = data["synthetic"].contains("seed");
      if (!cfg.synthetic_seed_given) cfg.synthetic->seed = derive_seed(cfg.seed, "synthetic");
    } else {
      cfg.csv = resolve(base_dir, data.at("csv").get<std::string>());
      cfg.schema = resolve(base_dir, data.at("schema").get<std::string>());
    }

    cfg.segment = doc.value("segment", cfg.segment);
    if (doc.contains("births") && !doc["births"].is_null()) {
      cfg.births = resolve(base_dir, doc["births"].get<std::string>());
    }
    if (doc.contains("split")) {
      expect_keys(doc["split"], {"test_fraction"}, "split");
      cfg.test_fraction = doc["split"].value("test_fraction", cfg.test_fraction);
    }
    if (doc.contains("resample")) cfg.resample = ResampleSpec::from_json(doc["resample"]);

    for (const auto& m : doc.at("models")) {
      expect_keys(m, {"name", "adjustments", "model", "resample"}, "model entry");
      ModelEntry e;
      e.name = m.at("name").get<std::string>();
      e.adjustments = m.value("adjustments", std::string{});
      e.model = m.at("model");
      ModelSpec::from_json(e.model);
      if (m.contains("resample")) e.resample = ResampleSpec::from_json(m["resample"]);
      cfg.models.push_back(std::move(e));
    }

    if (doc.contains("thresholds")) {
      const auto& t = doc["thresholds"];
      expect_keys(t, {"grid", "objective", "objectives"}, "thresholds");
      if (t.contains("grid")) cfg.threshold_grid = t["grid"].get<std::vector<double>>();
      if (t.contains("objective") && t.contains("objectives")) {
        throw Error(ErrorCode::InvalidConfig, "thresholds takes 'objective' or 'objectives', not both");
      }
      if (t.contains("objective")) {
        cfg.objectives = {ThresholdObjective::parse(t["objective"].get<std::string>())};
      } else if (t.contains("objectives")) {
        cfg.objectives.clear();
        for (const auto& o : t["objectives"]) cfg.objectives.push_back(ThresholdObjective::parse(o.get<std::string>()));
      }
    }
    if (doc.contains("cv") && !doc["cv"].is_null()) {
      expect_keys(doc["cv"], {"n_folds"}, "cv");
      cfg.cv_folds = doc["cv"].value("n_folds", 5);
    }
    if (doc.contains("grid")) {
      for (const auto& [model_name, params] : doc["grid"].items()) {
        ParamGrid g;
        for (const auto& [path, values] : params.items()) {
          if (!values.is_array()) throw Error(ErrorCode::InvalidConfig, "grid values for '" + path + "' must be a list");
          g[path] = std::vector<json>(values.begin(), values.end());
        }
        cfg.grids[model_name] = std::move(g);
      }
    }
    cfg.output = resolve(base_dir, doc.value("output", std::string("out")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  const std::string text = csv::read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return from_json(doc, path.parent_path());
}

json ExperimentConfig::to_json() const {
  json data;
  if (synthetic) {
    data["synthetic"] = synthetic->to_json();
  } else {
    data["csv"] = csv.string();
    data["schema"] = schema.string();
  }
  auto models_json = json::array();
  for (const auto& m : models) {
    json e{{"name", m.name}, {"adjustments", m.adjustments}, {"model", ModelSpec::from_json(m.model).to_json()}};
    if (m.resample) e["resample"] = m.resample->to_json();
    models_json.push_back(std::move(e));
  }
  auto objectives_json = json::array();
  for (const auto& o : objectives) objectives_json.push_back(o.describe());
  json grid = json::object();
  for (const auto& [name, g] : grids) {
    json dims = json::object();
    for (const auto& [path, values] : g) dims[path] = values;
    grid[name] = std::move(dims);
  }
  json out{{"data", data},
           {"segment", segment},
           {"births", births ? json(births->string()) : json(nullptr)},
           {"split", {{"test_fraction", test_fraction}}},
           {"resample", resample.to_json()},
           {"models", models_json},
           {"thresholds", {{"grid", threshold_grid}, {"objectives", objectives_json}}},
           {"cv", cv_folds ? json{{"n_folds", *cv_folds}} : json(nullptr)},
           {"grid", grid},
           {"output", output.string()},
           {"seed", seed}};
  return out;
}

std::string ExperimentConfig::digest() const {
  auto doc = to_json();
  doc.erase("output");
  return hex64(fnv1a64(doc.dump()));
}

void ExperimentConfig::validate() const {
  if (segment != "bd1" && segment != "bd2" && segment != "all") {
    throw Error(ErrorCode::InvalidConfig, "segment must be bd1, bd2 or all");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test_fraction must lie in (0, 1)");
  }
  if (models.empty()) throw Error(ErrorCode::InvalidConfig, "no models configured");
  if (threshold_grid.empty()) throw Error(ErrorCode::EmptyGrid, "threshold grid is empty");
  if (objectives.empty()) throw Error(ErrorCode::InvalidConfig, "no threshold objective configured");
  if (cv_folds && *cv_folds < 2) throw Error(ErrorCode::InvalidConfig, "cv.n_folds must be at least 2");
  for (const auto& [name, _] : grids) {
    if (std::none_of(models.begin(), models.end(), [&](const ModelEntry& m) { return m.name == name; })) {
      throw Error(ErrorCode::InvalidConfig, "grid given for unknown model '" + name + "'");
    }
  }
  if (!synthetic) {
    for (const auto& p : {csv, schema}) {
      if (!fs::exists(p)) throw Error(ErrorCode::InvalidConfig, "missing input file " + p.string());
    }
  }
  if (births && !fs::exists(*births)) throw Error(ErrorCode::InvalidConfig, "missing births file " + births->string());
}

namespace {

struct Prepared {
  Matrix x_train;
  Labels y_train;
  Matrix x_test;
  Labels y_test;
  std::vector<std::string> feature_names;
};

Prepared prepare(const ExperimentConfig& cfg, Warnings& warnings) {
  Dataset ds = cfg.synthetic ? generate_synthetic(*cfg.synthetic) : load_csv(cfg.csv, Schema::load(cfg.schema));
  if (ds.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");

  if (cfg.segment != "all") {
    auto seg = segment(ds);
    std::size_t reference_total = 0;
    for (const auto& [_, n] : reference_typology_counts()) reference_total += n;
    if (ds.size() == reference_total) {
      for (auto& w : reconcile_segments(seg)) warnings.push_back(std::move(w));
    }
    const bool children = cfg.segment == "bd1";
    ds = drop_inapplicable(children ? seg.children : seg.pregnant,
                           children ? SegmentKind::children : SegmentKind::pregnant);
  }
  if (ds.empty()) throw Error(ErrorCode::EmptyDataset, "segment " + cfg.segment + " has no rows");

  auto is_date = [&](std::string_view name) {
    const auto i = ds.schema.index_of(name);
    return i && ds.schema[*i].kind == ColumnKind::date;
  };
  if (is_date(kBirthDateColumn) && is_date(kDerivationDateColumn)) {
    ds = derive_age(ds, kBirthDateColumn, kDerivationDateColumn, &warnings);
  }
  std::vector<std::string> dates;
  for (const auto& c : ds.schema.columns()) {
    if (c.kind == ColumnKind::date) dates.push_back(c.name);
  }
  ds = drop_columns(ds, dates);

  std::optional<BirthsTable> births;
  if (cfg.births) {
    births = load_births(*cfg.births);
  } else if (cfg.synthetic) {
    births = synthetic_births(cfg.synthetic->seed);
  }
  if (births && ds.schema.department_index()) ds = join_births(ds, *births, &warnings);

  const auto split = stratified_split(ds.labels, cfg.test_fraction, derive_seed(cfg.seed, "split"));
  const auto train = ds.subset(split.train);
  const auto test = ds.subset(split.test);
  const auto enc = fit_encoder(train);
  Prepared p;
  auto ftrain = transform(enc, train, &warnings);
  auto ftest = transform(enc, test);
  p.x_train = std::move(ftrain.values);
  p.y_train = train.labels;
  p.x_test = std::move(ftest.values);
  p.y_test = test.labels;
  p.feature_names = std::move(ftrain.column_names);
  return p;
}

std::string unique_slug(std::set<std::string>& used, std::string slug) {
  if (slug.empty()) slug = "model";
  auto candidate = slug;
  for (int i = 2; used.count(candidate); ++i) candidate = slug + "-" + std::to_string(i);
  used.insert(candidate);
  return candidate;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto started = utc_now();
  ExperimentResult res;
  auto data = prepare(cfg, res.warnings);
  res.train_rows = data.x_train.rows();
  res.test_rows = data.x_test.rows();
  res.n_features = data.feature_names.size();
  const auto hash = schema_hash(data.feature_names);

  std::set<std::string> used;
  for (const auto& entry : cfg.models) {
    const auto model_seed = derive_seed(cfg.seed, "model/" + entry.name + "/" + entry.adjustments);
    std::string step = "config";
    try {
      json spec_doc = entry.model;
      const auto resample_spec = [&] {
        auto r = entry.resample.value_or(cfg.resample);
        r.seed = derive_seed(model_seed, "resample");
        return r;
      }();

      ModelOutcome outcome{entry.name, entry.adjustments};
      if (const auto g = cfg.grids.find(entry.name); g != cfg.grids.end()) {
        step = "grid_search";
        const auto plan = stratified_kfold(data.y_train, cfg.cv_folds.value_or(5), derive_seed(model_seed, "cv"));
        const auto gs = grid_search(
            spec_doc, g->second, [](const json& c) { return make_learner(ModelSpec::from_json(c)); },
            data.x_train, data.y_train, plan, resample_spec, derive_seed(model_seed, "grid"));
        spec_doc = gs.best_config();
        outcome.grid_choice = spec_doc;
      }
      const auto spec = ModelSpec::from_json(spec_doc);

      step = "fit";
      const auto model = resample_and_fit(make_learner(spec), data.x_train, data.y_train, resample_spec,
                                          derive_seed(model_seed, "fit"));
      step = "score";
      const auto scores = model->score(data.x_test);
      outcome.auc = roc_auc(data.y_test, scores);

      step = "sweep";
      for (const auto& objective : cfg.objectives) {
        outcome.best_per_objective.push_back(
            sweep_thresholds(data.y_test, scores, cfg.threshold_grid, objective, entry.name, entry.adjustments));
      }
      outcome.sweep = outcome.best_per_objective.front();

      step = "write";
      const auto slug = unique_slug(used, slugify(cfg.segment + "_" + entry.name + "_" + entry.adjustments));
      outcome.roc_path = "roc/" + slug + ".csv";
      outcome.scores_path = "scores/" + slug + ".csv";
      outcome.model_path = "models/" + slug + ".json";
      csv::write_text(cfg.output / outcome.roc_path, roc_curve(data.y_test, scores).to_csv());
      csv::write_text(cfg.output / outcome.scores_path, scores_csv(data.y_test, scores));
      save_model(cfg.output / outcome.model_path, *model, hash, model_seed);
      res.outputs.insert(res.outputs.end(), {outcome.roc_path, outcome.scores_path, outcome.model_path});

      for (const auto& row : outcome.sweep.rows) {
        res.records.push_back({row, cfg.segment, "sweep", "", false, outcome.auc});
      }
      for (std::size_t o = 0; o < cfg.objectives.size(); ++o) {
        const auto& sw = outcome.best_per_objective[o];
        res.records.push_back({sw.rows[sw.best_index], cfg.segment, "best", cfg.objectives[o].describe(),
                               sw.fallback, outcome.auc});
      }
      res.outcomes.push_back(std::move(outcome));
    } catch (const Error& e) {
      res.failures.push_back({entry.name, entry.adjustments, step, e.what()});
    } catch (const std::exception& e) {
      res.failures.push_back({entry.name, entry.adjustments, step, e.what()});
    }
  }

  csv::write_text(cfg.output / "metrics.csv", metrics_csv(res.records));
  std::vector<MetricsRecord> best;
  std::copy_if(res.records.begin(), res.records.end(), std::back_inserter(best),
               [](const MetricsRecord& r) { return r.row_type == "best"; });
  csv::write_text(cfg.output / "table.md", render_table(best));
  res.outputs.insert(res.outputs.begin(), {"metrics.csv", "table.md"});

  auto failures = json::array();
  for (const auto& f : res.failures) {
    failures.push_back({{"name", f.name}, {"adjustments", f.adjustments}, {"step", f.step}, {"message", f.message}});
  }
  auto models = json::array();
  for (const auto& o : res.outcomes) {
    auto thresholds = json::array();
    for (std::size_t i = 0; i < o.best_per_objective.size(); ++i) {
      thresholds.push_back({{"objective", cfg.objectives[i].describe()},
                            {"threshold", o.best_per_objective[i].best_threshold},
                            {"fallback", o.best_per_objective[i].fallback}});
    }
    models.push_back({{"name", o.name},
                      {"adjustments", o.adjustments},
                      {"auc", o.auc},
                      {"best", thresholds},
                      {"grid_choice", o.grid_choice.value_or(json(nullptr))},
                      {"roc", o.roc_path},
                      {"scores", o.scores_path},
                      {"model", o.model_path}});
  }
  res.outputs.push_back("manifest.json");
  res.manifest = {{"config_digest", cfg.digest()},
                  {"toolkit_version", std::string(toolkit_version())},
                  {"started_at", started},
                  {"finished_at", utc_now()},
                  {"seed", cfg.seed},
                  {"segment", cfg.segment},
                  {"rows", {{"train", res.train_rows}, {"test", res.test_rows}}},
                  {"n_features", res.n_features},
                  {"schema_hash", hash},
                  {"outputs", res.outputs},
                  {"models", models},
                  {"warnings", res.warnings},
                  {"failures", failures},
                  {"config", cfg.to_json()}};
  csv::write_text(cfg.output / "manifest.json", res.manifest.dump(2) + "\n");
  return res;
}

std::vector<fs::path> cmd_synth(const SynthConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const auto ds = generate_synthetic(cfg);
  const std::vector<fs::path> paths{out_dir / "data.csv", out_dir / "schema.json", out_dir / "births.csv"};
  save_csv(paths[0], ds);
  ds.schema.save(paths[1]);
  std::string births = "department,births\n";
  for (const auto& [dept, n] : synthetic_births(cfg.seed)) births += csv::escape(dept) + "," + format_number(n) + "\n";
  csv::write_text(paths[2], births);
  return paths;
}

}  // namespace screenml
