#pragma once

#include <array>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "screenml/dataset.hpp"
#include "screenml/features.hpp"

namespace screenml {

/// Typology codes in the order used by SynthConfig::typology_weights.
inline constexpr std::array<Typology, 6> kTypologyOrder{
    Typology::pregnant,           Typology::child,
    Typology::two_children,       Typology::pregnant_and_child,
    Typology::pregnant_and_two_children, Typology::unknown};

struct SynthConfig {
  std::size_t n_rows = 1000;
  double positive_rate = 0.35;
  std::array<double, 6> typology_weights = reference_typology_weights();
  std::size_t n_categorical = 4;
  std::size_t n_numeric = 8;
  double class_separation = 1.0;
  double missing_rate = 0.02;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig.
  void validate() const;

  static std::array<double, 6> reference_typology_weights();
  static SynthConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

inline constexpr std::string_view kBirthDateColumn = "birth_date";
inline constexpr std::string_view kDerivationDateColumn = "derivation_date";

Schema synthetic_schema(const SynthConfig& cfg);

/// Schema-faithful corpus whose label signal lives only in the numeric and
/// categorical feature columns, scaled by class_separation.
Dataset generate_synthetic(const SynthConfig& cfg);

/// A births-per-department table covering every department the generator emits.
BirthsTable synthetic_births(std::uint64_t seed);

const std::vector<std::string>& uruguay_departments();

}  // namespace screenml
