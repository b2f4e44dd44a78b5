#include "screenml/synthetic.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "screenml/random.hpp"

namespace screenml {

namespace {

constexpr std::size_t kCategoriesPerColumn = 4;

Applicability applicability_for(std::size_t j) {
  switch (j % 4) {
    case 2: return Applicability::child;
    case 3: return Applicability::pregnant;
    default: return Applicability::common;
  }
}

bool applies(Applicability a, Typology t) {
  switch (a) {
    case Applicability::common: return true;
    case Applicability::child: return in_children_segment(t);
    case Applicability::pregnant: return in_pregnant_segment(t);
  }
  return true;
}

std::size_t draw_weighted(Rng& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

std::string category_name(std::size_t k) { return "c" + std::to_string(k); }

}  // namespace

std::array<double, 6> SynthConfig::reference_typology_weights() {
  const auto& counts = reference_typology_counts();
  double total = 0.0;
  for (const auto& [t, n] : counts) total += static_cast<double>(n);
  std::array<double, 6> w{};
  for (std::size_t i = 0; i < kTypologyOrder.size(); ++i) {
    w[i] = static_cast<double>(counts.at(kTypologyOrder[i])) / total;
  }
  return w;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (n_rows == 0) fail("n_rows must be positive");
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) fail("positive_rate must lie in (0, 1)");
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation)) {
    fail("class_separation must be finite and >= 0");
  }
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) fail("missing_rate must lie in [0, 1)");
  double sum = 0.0;
  for (double w : typology_weights) {
    if (!(w >= 0.0)) fail("typology weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail("typology weights must sum to 1");
}

SynthConfig SynthConfig::from_json(const nlohmann::json& doc) {
  SynthConfig cfg;
  try {
    cfg.n_rows = doc.value("n_rows", cfg.n_rows);
    cfg.positive_rate = doc.value("positive_rate", cfg.positive_rate);
    cfg.n_categorical = doc.value("n_categorical", cfg.n_categorical);
    cfg.n_numeric = doc.value("n_numeric", cfg.n_numeric);
    cfg.class_separation = doc.value("class_separation", cfg.class_separation);
    cfg.missing_rate = doc.value("missing_rate", cfg.missing_rate);
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("typology_weights")) {
      const auto& w = doc.at("typology_weights");
      if (w.is_string()) {
        if (w.get<std::string>() != "reference") {
          throw Error(ErrorCode::InvalidConfig, "typology_weights must be 'reference' or a list");
        }
      } else if (w.is_object()) {
        cfg.typology_weights.fill(0.0);
        for (std::size_t i = 0; i < kTypologyOrder.size(); ++i) {
          cfg.typology_weights[i] = w.value(std::to_string(code(kTypologyOrder[i])), 0.0);
        }
      } else {
        const auto list = w.get<std::vector<double>>();
        if (list.size() != 6) throw Error(ErrorCode::InvalidConfig, "typology_weights needs 6 entries");
        std::copy(list.begin(), list.end(), cfg.typology_weights.begin());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("synthetic config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json SynthConfig::to_json() const {
  return {{"n_rows", n_rows},
          {"positive_rate", positive_rate},
          {"typology_weights", typology_weights},
          {"n_categorical", n_categorical},
          {"n_numeric", n_numeric},
          {"class_separation", class_separation},
          {"missing_rate", missing_rate},
          {"seed", seed}};
}

const std::vector<std::string>& uruguay_departments() {
  static const std::vector<std::string> names{
      "Artigas",  "Canelones", "Cerro Largo", "Colonia",   "Durazno", "Flores",  "Florida",
      "Lavalleja", "Maldonado", "Montevideo", "Paysandu",  "Rio Negro", "Rivera", "Rocha",
      "Salto",    "San Jose",  "Soriano",     "Tacuarembo", "Treinta y Tres"};
  return names;
}

Schema synthetic_schema(const SynthConfig& cfg) {
  std::vector<ColumnSpec> cols;
  cols.push_back({.name = "typology",
                  .kind = ColumnKind::typology,
                  .missing_codes = {"", "99", "Sin dato"}});
  cols.push_back({.name = "accepted", .kind = ColumnKind::label, .missing_codes = {""}});
  cols.push_back({.name = std::string(kDerivationDateColumn), .kind = ColumnKind::date});
  cols.push_back({.name = std::string(kBirthDateColumn), .kind = ColumnKind::date});
  cols.push_back({.name = "department", .kind = ColumnKind::department, .missing_codes = {"", "99"}});
  std::vector<std::string> categories;
  for (std::size_t k = 0; k < kCategoriesPerColumn; ++k) categories.push_back(category_name(k));
  for (std::size_t j = 0; j < cfg.n_categorical; ++j) {
    cols.push_back({.name = "cat_" + std::to_string(j),
                    .kind = ColumnKind::categorical,
                    .applicability = applicability_for(j),
                    .allowed_categories = categories,
                    .missing_codes = {"", "99", "Sin dato"}});
  }
  for (std::size_t j = 0; j < cfg.n_numeric; ++j) {
    cols.push_back({.name = "num_" + std::to_string(j),
                    .kind = ColumnKind::numeric,
                    .applicability = applicability_for(j),
                    .missing_codes = {"", "99"}});
  }
  return Schema(std::move(cols));
}

Dataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Dataset ds;
  ds.schema = synthetic_schema(cfg);
  ds.rows.reserve(cfg.n_rows);
  ds.labels.reserve(cfg.n_rows);
  ds.typologies.reserve(cfg.n_rows);

  Rng rng(cfg.seed);
  const auto& departments = uruguay_departments();
  std::vector<double> dept_weights(departments.size(), 1.0);
  dept_weights[9] = 6.0;  // Montevideo
  dept_weights[1] = 3.0;  // Canelones

  using namespace std::chrono;
  const sys_days first_day{year{2018} / January / 1};
  const auto window = (sys_days{year{2024} / December / 31} - first_day).count() + 1;

  const double half = (kCategoriesPerColumn - 1) / 2.0;
  std::vector<double> positive_cat(kCategoriesPerColumn);
  std::vector<double> negative_cat(kCategoriesPerColumn, 1.0);
  for (std::size_t k = 0; k < kCategoriesPerColumn; ++k) {
    positive_cat[k] = std::exp(0.5 * cfg.class_separation * (static_cast<double>(k) - half) / half);
  }

  for (std::size_t i = 0; i < cfg.n_rows; ++i) {
    const auto t = kTypologyOrder[draw_weighted(rng, cfg.typology_weights)];
    const int y = rng.bernoulli(cfg.positive_rate) ? 1 : 0;
    Row row;
    row.reserve(ds.schema.size());
    row.push_back(t == Typology::unknown ? Cell{Missing{}} : Cell{static_cast<double>(code(t))});
    row.push_back(Category{y ? "1" : "0"});

    const auto derivation = first_day + days{static_cast<int>(rng.index(window))};
    // Children under four, otherwise an adult mother.
    const auto age = t == Typology::pregnant || t == Typology::unknown
                         ? 15 * 365 + static_cast<int>(rng.index(30 * 365))
                         : static_cast<int>(rng.index(4 * 365));
    const auto birth = derivation - days{age};
    auto maybe_missing = [&](Cell value) {
      return rng.bernoulli(cfg.missing_rate) ? Cell{Missing{}} : value;
    };
    row.push_back(maybe_missing(year_month_day{derivation}));
    row.push_back(maybe_missing(year_month_day{birth}));
    row.push_back(maybe_missing(Category{departments[draw_weighted(rng, dept_weights)]}));

    for (std::size_t j = 0; j < cfg.n_categorical; ++j) {
      const auto k = draw_weighted(rng, y ? positive_cat : negative_cat);
      Cell value = Category{category_name(k)};
      value = maybe_missing(value);
      if (!applies(applicability_for(j), t)) value = Missing{};
      row.push_back(value);
    }
    for (std::size_t j = 0; j < cfg.n_numeric; ++j) {
      const double loc = 10.0 * static_cast<double>(j);
      const double scale = 1.0 + static_cast<double>(j % 3);
      Cell value = loc + scale * (rng.normal() + y * cfg.class_separation);
      value = maybe_missing(value);
      if (!applies(applicability_for(j), t)) value = Missing{};
      row.push_back(value);
    }
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(y);
    ds.typologies.push_back(t);
  }
  return ds;
}

BirthsTable synthetic_births(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "births"));
  BirthsTable table;
  for (const auto& d : uruguay_departments()) {
    table[d] = static_cast<double>(500 + rng.index(2500));
  }
  table["Montevideo"] = 14000.0 + static_cast<double>(rng.index(2000));
  table["Canelones"] = 7000.0 + static_cast<double>(rng.index(1000));
  return table;
}

}  // namespace screenml
