#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "screenml/dataset.hpp"
#include "screenml/matrix.hpp"

namespace screenml {

/// Name of the column appended by join_births; scaled min-max by transform.
inline constexpr std::string_view kBirthsColumn = "births_dept";
/// Name of the column appended by derive_age.
inline constexpr std::string_view kAgeColumn = "age_days";
/// One-hot slot shared by missing and unseen categories.
inline constexpr std::string_view kOtherSlot = "__other__";

/// Non-fatal data-quality notes collected while preparing features.
using Warnings = std::vector<std::string>;

struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> column_names;

  std::string to_csv() const;
};

/// How one schema column becomes feature columns.
struct ColumnEncoding {
  enum class Method { one_hot, z_score, min_max };

  Method method = Method::z_score;
  std::size_t column = 0;
  std::vector<std::string> categories;  // one_hot: lexicographic, other slot follows
  double mean = 0.0;                    // z_score
  double sd = 0.0;                      // z_score, population (divides by n)
  double median = 0.0;                  // z_score and min_max imputation value
  double min = 0.0;                     // min_max
  double max = 0.0;                     // min_max
};

/// Encoding statistics learned from a training split only.
struct EncoderModel {
  Schema schema;
  std::vector<ColumnEncoding> columns;
  std::vector<std::size_t> dropped_dates;
  std::vector<std::string> feature_names;

  std::size_t n_features() const noexcept { return feature_names.size(); }
  const ColumnEncoding* find(std::string_view column_name) const;
};

EncoderModel fit_encoder(const Dataset& train);

/// Dropped date columns are reported through `warnings` when given.
FeatureMatrix transform(const EncoderModel& enc, const Dataset& ds, Warnings* warnings = nullptr);

/// Appends age_days = derivation date - birth date in whole days.
Dataset derive_age(const Dataset& ds, std::string_view birth_col, std::string_view derivation_col,
                   Warnings* warnings = nullptr);

using BirthsTable = std::map<std::string, double>;

BirthsTable load_births(const std::filesystem::path& path);

/// Appends births_dept with the raw count for each row's department.
Dataset join_births(const Dataset& ds, const BirthsTable& births, Warnings* warnings = nullptr);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per class, round-half-up(n_class * test_fraction) rows go to the test side.
SplitIndices stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

}  // namespace screenml
