#include "screenml/resample.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "screenml/random.hpp"

namespace screenml {

std::string_view to_string(ResampleMethod m) {
  switch (m) {
    case ResampleMethod::none: return "none";
    case ResampleMethod::smote: return "smote";
    case ResampleMethod::rus: return "rus";
  }
  return "none";
}

void ResampleSpec::validate() const {
  if (!(target_ratio > 0.0) || !std::isfinite(target_ratio)) {
    throw Error(ErrorCode::InvalidConfig, "resample target_ratio must be > 0");
  }
  if (k_neighbors < 1) throw Error(ErrorCode::InvalidConfig, "smote k_neighbors must be >= 1");
}

ResampleSpec ResampleSpec::from_json(const nlohmann::json& doc) {
  ResampleSpec spec;
  try {
    const auto method = doc.value("method", std::string("none"));
    if (method == "none") {
      spec.method = ResampleMethod::none;
    } else if (method == "smote") {
      spec.method = ResampleMethod::smote;
    } else if (method == "rus") {
      spec.method = ResampleMethod::rus;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown resample method '" + method + "'");
    }
    spec.target_ratio = doc.value("target_ratio", spec.target_ratio);
    spec.k_neighbors = doc.value("k_neighbors", spec.k_neighbors);
    spec.seed = doc.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("resample spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json ResampleSpec::to_json() const {
  return {{"method", std::string(to_string(method))},
          {"target_ratio", target_ratio},
          {"k_neighbors", k_neighbors},
          {"seed", seed}};
}

ClassCounts class_counts(std::span<const int> y) {
  std::size_t pos = 0;
  for (int v : y) pos += v == 1;
  const std::size_t neg = y.size() - pos;
  if (pos <= neg) return {1, pos, neg};
  return {0, neg, pos};
}

namespace {

Resampled identity(const Matrix& x, std::span<const int> y) {
  Resampled out{x, Labels(y.begin(), y.end()), {}, {}};
  out.source_rows.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out.source_rows[i] = i;
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace

Resampled smote(const Matrix& x, std::span<const int> y, const ResampleSpec& spec) {
  spec.validate();
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "smote: label count");
  const auto counts = class_counts(y);
  if (counts.minority < 2) {
    throw Error(ErrorCode::TooFewMinority, "smote needs at least 2 minority rows, got " +
                                               std::to_string(counts.minority));
  }
  const auto target = static_cast<std::size_t>(
      std::floor(spec.target_ratio * static_cast<double>(counts.majority)));
  if (target <= counts.minority) return identity(x, y);

  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == counts.minority_label) minority.push_back(i);
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(spec.k_neighbors),
                                              minority.size() - 1);

  // Neighbour lists are computed on first use; ties go to the lower row index.
  std::map<std::size_t, std::vector<std::size_t>> neighbours;
  auto neighbours_of = [&](std::size_t position) -> const std::vector<std::size_t>& {
    auto it = neighbours.find(position);
    if (it != neighbours.end()) return it->second;
    const auto base = x.row(minority[position]);
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(minority.size() - 1);
    for (std::size_t j = 0; j < minority.size(); ++j) {
      if (j != position) dist.emplace_back(squared_distance(base, x.row(minority[j])), minority[j]);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
    std::vector<std::size_t> nn;
    for (std::size_t j = 0; j < k; ++j) nn.push_back(dist[j].second);
    return neighbours.emplace(position, std::move(nn)).first->second;
  };

  Resampled out = identity(x, y);
  Rng rng(spec.seed);
  std::vector<double> row(x.cols());
  for (std::size_t made = counts.minority; made < target; ++made) {
    const auto position = static_cast<std::size_t>(rng.index(minority.size()));
    const auto& nn = neighbours_of(position);
    const auto neighbour = nn[static_cast<std::size_t>(rng.index(nn.size()))];
    const double lambda = rng.uniform();
    const auto a = x.row(minority[position]);
    const auto b = x.row(neighbour);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = a[c] + lambda * (b[c] - a[c]);
    out.x.append_row(row);
    out.y.push_back(counts.minority_label);
    out.synthetic.push_back({minority[position], neighbour, lambda});
  }
  return out;
}

Resampled random_undersample(const Matrix& x, std::span<const int> y, const ResampleSpec& spec) {
  spec.validate();
  if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "rus: label count");
  const auto counts = class_counts(y);
  if (counts.minority == 0) throw Error(ErrorCode::SingleClass, "undersampling needs both classes");
  const auto keep = static_cast<std::size_t>(
      std::llround(static_cast<double>(counts.minority) / spec.target_ratio));
  if (keep > counts.majority) {
    throw Error(ErrorCode::InvalidRatio, "target ratio needs " + std::to_string(keep) +
                                             " majority rows but only " +
                                             std::to_string(counts.majority) + " exist");
  }
  std::vector<std::size_t> majority;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < y.size(); ++i) {
    (y[i] == counts.minority_label ? kept : majority).push_back(i);
  }
  Rng rng(spec.seed);
  rng.shuffle(std::span(majority));
  kept.insert(kept.end(), majority.begin(), majority.begin() + static_cast<long>(keep));
  std::sort(kept.begin(), kept.end());

  Resampled out{x.select_rows(kept), select(y, kept), kept, {}};
  return out;
}

Resampled resample(const Matrix& x, std::span<const int> y, const ResampleSpec& spec) {
  switch (spec.method) {
    case ResampleMethod::none: return identity(x, y);
    case ResampleMethod::smote: return smote(x, y, spec);
    case ResampleMethod::rus: return random_undersample(x, y, spec);
  }
  return identity(x, y);
}

}  // namespace screenml
