#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "screenml/matrix.hpp"

namespace screenml {

enum class ResampleMethod { none, smote, rus };

std::string_view to_string(ResampleMethod m);

struct ResampleSpec {
  ResampleMethod method = ResampleMethod::none;
  /// Desired minority/majority count ratio after resampling.
  double target_ratio = 1.0;
  int k_neighbors = 5;
  std::uint64_t seed = 0;

  void validate() const;
  static ResampleSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Provenance of one SMOTE row: base + lambda * (neighbor - base), all minority originals.
struct SyntheticOrigin {
  std::size_t base = 0;
  std::size_t neighbor = 0;
  double lambda = 0.0;
};

struct Resampled {
  Matrix x;
  Labels y;
  /// Input row of every output row that is an original (all of them for RUS);
  /// SMOTE rows follow the originals and are described by `synthetic`.
  std::vector<std::size_t> source_rows;
  std::vector<SyntheticOrigin> synthetic;
};

struct ClassCounts {
  int minority_label = 1;
  std::size_t minority = 0;
  std::size_t majority = 0;
};

/// The smaller class is the minority; label 1 on ties.
ClassCounts class_counts(std::span<const int> y);

/// Appends interpolated minority rows until minority = floor(target_ratio * majority).
Resampled smote(const Matrix& x, std::span<const int> y, const ResampleSpec& spec);

/// Keeps every minority row plus round(minority / target_ratio) majority rows
/// drawn uniformly without replacement. Output keeps input order.
Resampled random_undersample(const Matrix& x, std::span<const int> y, const ResampleSpec& spec);

/// Dispatches on spec.method; `none` returns the input unchanged.
Resampled resample(const Matrix& x, std::span<const int> y, const ResampleSpec& spec);

}  // namespace screenml
