#include "screenml/model_spec.hpp"

#include <initializer_list>

#include "screenml/csv.hpp"
#include "screenml/ensemble.hpp"
#include "screenml/error.hpp"
#include "screenml/random.hpp"

namespace screenml {

namespace {

using nlohmann::json;

void expect_keys(const json& doc, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::InvalidConfig,
                  "unknown key '" + key + "' in " + std::string(what) + " config");
    }
  }
}

TreeConfig tree_from(const json& doc) {
  expect_keys(doc, {"kind", "max_depth", "min_samples_split", "min_samples_leaf"}, "tree");
  TreeConfig c;
  if (doc.contains("max_depth") && !doc["max_depth"].is_null()) c.max_depth = doc["max_depth"].get<int>();
  c.min_samples_split = doc.value("min_samples_split", c.min_samples_split);
  c.min_samples_leaf = doc.value("min_samples_leaf", c.min_samples_leaf);
  c.validate();
  return c;
}

json tree_to(const TreeConfig& c) {
  return {{"max_depth", c.max_depth ? json(*c.max_depth) : json(nullptr)},
          {"min_samples_split", c.min_samples_split},
          {"min_samples_leaf", c.min_samples_leaf}};
}

LogRegConfig logreg_from(const json& doc) {
  expect_keys(doc, {"kind", "learning_rate", "epochs", "l2"}, "logreg");
  LogRegConfig c;
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.epochs = doc.value("epochs", c.epochs);
  c.l2 = doc.value("l2", c.l2);
  c.validate();
  return c;
}

json logreg_to(const LogRegConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs}, {"l2", c.l2}};
}

BoostConfig boost_from(const json& doc) {
  BoostConfig c;
  c.n_estimators = doc.value("n_estimators", c.n_estimators);
  if (doc.contains("base_tree")) c.base_tree = tree_from(doc["base_tree"]);
  c.validate();
  return c;
}

json boost_to(const BoostConfig& c) {
  return {{"n_estimators", c.n_estimators}, {"base_tree", tree_to(c.base_tree)}};
}

std::vector<ModelSpec> spec_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty()) {
    throw Error(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a non-empty list");
  }
  std::vector<ModelSpec> out;
  for (const auto& item : doc[key]) out.push_back(ModelSpec::from_json(item));
  return out;
}

json spec_list_to(const std::vector<ModelSpec>& specs) {
  auto arr = json::array();
  for (const auto& s : specs) arr.push_back(s.to_json());
  return arr;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string ModelSpec::kind() const {
  return std::visit(overloaded{
                        [](const LogRegConfig&) { return "logreg"; },
                        [](const TreeConfig&) { return "tree"; },
                        [](const ForestConfig&) { return "forest"; },
                        [](const GbtConfig&) { return "gbt"; },
                        [](const MlpConfig&) { return "mlp"; },
                        [](const AdaBoostSpec&) { return "adaboost"; },
                        [](const RusBoostSpec&) { return "rusboost"; },
                        [](const EasyEnsembleSpec&) { return "easy_ensemble"; },
                        [](const StackSpec&) { return "stacking"; },
                        [](const VotingSpec&) { return "voting"; },
                    },
                    config);
}

ModelSpec ModelSpec::from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw Error(ErrorCode::InvalidConfig, "model config needs a string 'kind'");
  }
  const auto kind = doc["kind"].get<std::string>();
  try {
    if (kind == "logreg") return {logreg_from(doc)};
    if (kind == "tree") return {tree_from(doc)};
    if (kind == "forest") {
      expect_keys(doc, {"kind", "n_trees", "max_features", "tree", "bootstrap", "n_threads"}, kind);
      ForestConfig c;
      c.n_trees = doc.value("n_trees", c.n_trees);
      if (doc.contains("max_features") && !doc["max_features"].is_null()) {
        const auto& mf = doc["max_features"];
        if (mf.is_string()) {
          if (mf.get<std::string>() != "sqrt") throw Error(ErrorCode::InvalidConfig, "max_features must be \"sqrt\" or an integer");
        } else {
          c.max_features = mf.get<std::size_t>();
          if (*c.max_features == 0) throw Error(ErrorCode::InvalidConfig, "max_features must be positive");
        }
      }
      if (doc.contains("tree")) c.tree = tree_from(doc["tree"]);
      c.bootstrap = doc.value("bootstrap", c.bootstrap);
      c.n_threads = doc.value("n_threads", c.n_threads);
      if (c.n_trees < 1 || c.n_threads < 1) throw Error(ErrorCode::InvalidConfig, "forest needs n_trees, n_threads >= 1");
      return {c};
    }
    if (kind == "gbt") {
      expect_keys(doc, {"kind", "n_rounds", "shrinkage", "max_depth", "lambda", "gamma", "min_child_weight"}, kind);
      GbtConfig c;
      c.n_rounds = doc.value("n_rounds", c.n_rounds);
      c.shrinkage = doc.value("shrinkage", c.shrinkage);
      c.max_depth = doc.value("max_depth", c.max_depth);
      c.lambda = doc.value("lambda", c.lambda);
      c.gamma = doc.value("gamma", c.gamma);
      c.min_child_weight = doc.value("min_child_weight", c.min_child_weight);
      c.validate();
      return {c};
    }
    if (kind == "mlp") {
      expect_keys(doc, {"kind", "hidden_layers", "epochs", "batch_size", "learning_rate"}, kind);
      MlpConfig c;
      if (doc.contains("hidden_layers")) c.hidden_layers = doc["hidden_layers"].get<std::vector<std::size_t>>();
      c.epochs = doc.value("epochs", c.epochs);
      c.batch_size = doc.value("batch_size", c.batch_size);
      c.learning_rate = doc.value("learning_rate", c.learning_rate);
      c.validate();
      return {c};
    }
    if (kind == "adaboost") {
      expect_keys(doc, {"kind", "n_estimators", "base_tree"}, kind);
      return {AdaBoostSpec{boost_from(doc)}};
    }
    if (kind == "rusboost") {
      expect_keys(doc, {"kind", "n_estimators", "base_tree", "target_ratio"}, kind);
      RusBoostSpec s{boost_from(doc)};
      s.sampling.target_ratio = doc.value("target_ratio", s.sampling.target_ratio);
      s.sampling.validate();
      return {s};
    }
    if (kind == "easy_ensemble") {
      expect_keys(doc, {"kind", "n_subsets", "n_estimators", "base_tree"}, kind);
      EasyEnsembleSpec s{doc.value("n_subsets", 10), boost_from(doc)};
      if (s.n_subsets < 1) throw Error(ErrorCode::InvalidConfig, "n_subsets must be positive");
      return {s};
    }
    if (kind == "stacking") {
      expect_keys(doc, {"kind", "bases", "meta", "n_folds"}, kind);
      StackSpec s;
      s.bases = spec_list(doc, "bases");
      if (doc.contains("meta")) s.meta = logreg_from(doc["meta"]);
      s.n_folds = doc.value("n_folds", s.n_folds);
      if (s.n_folds < 2) throw Error(ErrorCode::InvalidConfig, "stacking needs n_folds >= 2");
      return {s};
    }
    if (kind == "voting") {
      expect_keys(doc, {"kind", "members"}, kind);
      return {VotingSpec{spec_list(doc, "members")}};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, kind + " config: " + e.what());
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model kind '" + kind + "'");
}

json ModelSpec::to_json() const {
  json out = std::visit(
      overloaded{
          [](const LogRegConfig& c) { return logreg_to(c); },
          [](const TreeConfig& c) { return tree_to(c); },
          [](const ForestConfig& c) {
            return json{{"n_trees", c.n_trees},
                        {"max_features", c.max_features ? json(*c.max_features) : json("sqrt")},
                        {"tree", tree_to(c.tree)},
                        {"bootstrap", c.bootstrap},
                        {"n_threads", c.n_threads}};
          },
          [](const GbtConfig& c) {
            return json{{"n_rounds", c.n_rounds}, {"shrinkage", c.shrinkage},
                        {"max_depth", c.max_depth}, {"lambda", c.lambda},
                        {"gamma", c.gamma},       {"min_child_weight", c.min_child_weight}};
          },
          [](const MlpConfig& c) {
            return json{{"hidden_layers", c.hidden_layers}, {"epochs", c.epochs},
                        {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate}};
          },
          [](const AdaBoostSpec& s) { return boost_to(s.boost); },
          [](const RusBoostSpec& s) {
            auto j = boost_to(s.boost);
            j["target_ratio"] = s.sampling.target_ratio;
            return j;
          },
          [](const EasyEnsembleSpec& s) {
            auto j = boost_to(s.boost);
            j["n_subsets"] = s.n_subsets;
            return j;
          },
          [](const StackSpec& s) {
            return json{{"bases", spec_list_to(s.bases)}, {"meta", logreg_to(s.meta)}, {"n_folds", s.n_folds}};
          },
          [](const VotingSpec& s) { return json{{"members", spec_list_to(s.members)}}; },
      },
      config);
  out["kind"] = kind();
  return out;
}

Learner make_learner(const ModelSpec& spec) {
  return std::visit(
      overloaded{
          [](const LogRegConfig& c) -> Learner {
            return [c](const Matrix& x, std::span<const int> y, std::uint64_t) -> FittedModel {
              return logreg_fit(x, y, c);
            };
          },
          [](const TreeConfig& c) -> Learner {
            return [c](const Matrix& x, std::span<const int> y, std::uint64_t) -> FittedModel {
              return tree_fit(x, y, c);
            };
          },
          [](const ForestConfig& c) -> Learner {
            return [c](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              return forest_fit(x, y, c, seed);
            };
          },
          [](const GbtConfig& c) -> Learner {
            return [c](const Matrix& x, std::span<const int> y, std::uint64_t) -> FittedModel {
              return gbt_fit(x, y, c);
            };
          },
          [](const MlpConfig& c) -> Learner {
            return [c](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              auto cfg = c;
              cfg.seed = seed;
              return mlp_fit(x, y, cfg);
            };
          },
          [](const AdaBoostSpec& s) -> Learner {
            return [s](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              auto cfg = s.boost;
              cfg.seed = seed;
              return adaboost_fit(x, y, cfg);
            };
          },
          [](const RusBoostSpec& s) -> Learner {
            return [s](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              auto cfg = s.boost;
              cfg.seed = seed;
              return rusboost_fit(x, y, cfg, s.sampling);
            };
          },
          [](const EasyEnsembleSpec& s) -> Learner {
            return [s](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              return easy_ensemble_fit(x, y, s.n_subsets, s.boost, seed);
            };
          },
          [](const StackSpec& s) -> Learner {
            std::vector<Learner> bases;
            for (const auto& b : s.bases) bases.push_back(make_learner(b));
            return [bases, s](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              return stacking_fit(x, y, bases, s.meta, s.n_folds, seed).model;
            };
          },
          [](const VotingSpec& s) -> Learner {
            std::vector<Learner> members;
            for (const auto& m : s.members) members.push_back(make_learner(m));
            return [members](const Matrix& x, std::span<const int> y, std::uint64_t seed) -> FittedModel {
              std::vector<FittedModel> fitted;
              for (std::size_t j = 0; j < members.size(); ++j) fitted.push_back(members[j](x, y, derive_seed(seed, j)));
              return std::make_shared<const VotingModel>(std::move(fitted));
            };
          },
      },
      spec.config);
}

json model_to_json(const Model& model) {
  return {{"kind", std::string(model.kind())}, {"params", model.params()}};
}

FittedModel model_from_json(const json& doc) {
  try {
    const auto kind = doc.at("kind").get<std::string>();
    const auto& p = doc.at("params");
    if (kind == "logreg") return LogisticRegression::from_params(p);
    if (kind == "tree") return DecisionTree::from_params(p);
    if (kind == "forest") return RandomForest::from_params(p);
    if (kind == "gbt") return GradientBoostedTrees::from_params(p);
    if (kind == "mlp") return Mlp::from_params(p);
    if (kind == "adaboost" || kind == "rusboost") return AdaBoostModel::from_params(p, kind);
    if (kind == "easy_ensemble") return EasyEnsembleModel::from_params(p);
    if (kind == "voting") {
      std::vector<FittedModel> members;
      for (const auto& m : p.at("members")) members.push_back(model_from_json(m));
      return std::make_shared<const VotingModel>(std::move(members));
    }
    if (kind == "stacking") {
      std::vector<FittedModel> bases;
      for (const auto& m : p.at("bases")) bases.push_back(model_from_json(m));
      return std::make_shared<const StackingModel>(std::move(bases),
                                                   *LogisticRegression::from_params(p.at("meta")));
    }
    throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model document: ") + e.what());
  }
}

std::uint64_t schema_hash(const std::vector<std::string>& feature_names) {
  std::string joined;
  for (const auto& n : feature_names) {
    joined += n;
    joined += '\n';
  }
  return fnv1a64(joined);
}

json model_document(const Model& model, std::uint64_t hash, std::uint64_t seed) {
  return {{"format_version", kModelFormatVersion},
          {"model_kind", std::string(model.kind())},
          {"schema_hash", hash},
          {"seed", seed},
          {"params", model.params()}};
}

ModelFile parse_model_document(const json& doc) {
  if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    throw Error(ErrorCode::ParseError, "model document lacks an integer format_version");
  }
  const auto version = doc["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::UnknownFormatVersion,
                "unsupported model format_version " + std::to_string(version));
  }
  try {
    ModelFile out;
    out.model = model_from_json({{"kind", doc.at("model_kind")}, {"params", doc.at("params")}});
    out.schema_hash = doc.at("schema_hash").get<std::uint64_t>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model document: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model, std::uint64_t hash,
                std::uint64_t seed) {
  csv::write_text(path, model_document(model, hash, seed).dump(1) + "\n");
}

ModelFile load_model(const std::filesystem::path& path) {
  const auto text = csv::read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return parse_model_document(doc);
}

}  // namespace screenml
