#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenml/boosting.hpp"
#include "screenml/forest.hpp"
#include "screenml/gbt.hpp"
#include "screenml/logistic.hpp"
#include "screenml/mlp.hpp"

namespace screenml {

struct ModelSpec;

struct AdaBoostSpec {
  BoostConfig boost;
};

struct RusBoostSpec {
  BoostConfig boost;
  ResampleSpec sampling{.method = ResampleMethod::rus};
};

struct EasyEnsembleSpec {
  int n_subsets = 10;
  BoostConfig boost;
};

struct StackSpec {
  std::vector<ModelSpec> bases;
  LogRegConfig meta;
  int n_folds = 5;
};

struct VotingSpec {
  std::vector<ModelSpec> members;
};

/// Untrained classifier configuration, tagged by "kind" in JSON.
struct ModelSpec {
  std::variant<LogRegConfig, TreeConfig, ForestConfig, GbtConfig, MlpConfig, AdaBoostSpec,
               RusBoostSpec, EasyEnsembleSpec, StackSpec, VotingSpec>
      config;

  std::string kind() const;
  static ModelSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// The training seed passed to the learner overrides any seed inside the spec.
Learner make_learner(const ModelSpec& spec);

inline constexpr int kModelFormatVersion = 1;

/// {"kind", "params"} for any fitted model.
nlohmann::json model_to_json(const Model& model);
FittedModel model_from_json(const nlohmann::json& doc);

/// FNV-1a over the newline-joined feature names.
std::uint64_t schema_hash(const std::vector<std::string>& feature_names);

struct ModelFile {
  FittedModel model;
  std::uint64_t schema_hash = 0;
  std::uint64_t seed = 0;
};

nlohmann::json model_document(const Model& model, std::uint64_t schema_hash, std::uint64_t seed);
ModelFile parse_model_document(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const Model& model, std::uint64_t schema_hash,
                std::uint64_t seed);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace screenml
