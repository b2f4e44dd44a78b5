#include "screenml/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "screenml/csv.hpp"
#include "screenml/random.hpp"

namespace screenml {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> present_numbers(const Dataset& ds, std::size_t col) {
  std::vector<double> out;
  for (const auto& row : ds.rows) {
    if (const auto* v = std::get_if<double>(&row[col])) out.push_back(*v);
  }
  return out;
}

bool is_births(const ColumnSpec& c) {
  return c.name == kBirthsColumn && c.kind == ColumnKind::numeric;
}

}  // namespace

std::string FeatureMatrix::to_csv() const {
  std::ostringstream out;
  csv::write_record(out, column_names);
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < values.rows(); ++r) {
    fields.clear();
    for (double v : values.row(r)) fields.push_back(format_number(v));
    csv::write_record(out, fields);
  }
  return out.str();
}

const ColumnEncoding* EncoderModel::find(std::string_view column_name) const {
  for (const auto& c : columns) {
    if (schema[c.column].name == column_name) return &c;
  }
  return nullptr;
}

EncoderModel fit_encoder(const Dataset& train) {
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit encoder on empty training set");
  EncoderModel enc;
  enc.schema = train.schema;
  for (std::size_t c = 0; c < train.schema.size(); ++c) {
    const auto& spec = train.schema[c];
    ColumnEncoding e;
    e.column = c;
    switch (spec.kind) {
      case ColumnKind::label:
      case ColumnKind::typology:
        continue;
      case ColumnKind::date:
        enc.dropped_dates.push_back(c);
        continue;
      case ColumnKind::categorical:
      case ColumnKind::department: {
        std::set<std::string> seen;
        for (const auto& row : train.rows) {
          if (const auto* cat = std::get_if<Category>(&row[c])) seen.insert(cat->value);
        }
        e.method = ColumnEncoding::Method::one_hot;
        e.categories.assign(seen.begin(), seen.end());
        for (const auto& cat : e.categories) enc.feature_names.push_back(spec.name + "=" + cat);
        enc.feature_names.push_back(spec.name + "=" + std::string(kOtherSlot));
        break;
      }
      case ColumnKind::numeric:
      case ColumnKind::binary: {
        const auto values = present_numbers(train, c);
        e.median = median_of(values);
        if (is_births(spec)) {
          e.method = ColumnEncoding::Method::min_max;
          if (!values.empty()) {
            auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            e.min = *lo;
            e.max = *hi;
          }
        } else {
          e.method = ColumnEncoding::Method::z_score;
          if (!values.empty()) {
            double sum = 0.0;
            for (double v : values) sum += v;
            e.mean = sum / static_cast<double>(values.size());
            double ss = 0.0;
            for (double v : values) ss += (v - e.mean) * (v - e.mean);
            e.sd = std::sqrt(ss / static_cast<double>(values.size()));
          }
        }
        enc.feature_names.push_back(spec.name);
        break;
      }
    }
    enc.columns.push_back(std::move(e));
  }
  return enc;
}

FeatureMatrix transform(const EncoderModel& enc, const Dataset& ds, Warnings* warnings) {
  if (!(ds.schema == enc.schema)) {
    throw Error(ErrorCode::SchemaMismatch, "dataset schema differs from the schema the encoder was fitted on");
  }
  if (warnings) {
    for (auto c : enc.dropped_dates) {
      warnings->push_back("date column '" + enc.schema[c].name +
                          "' dropped from features; derive numeric features from it first");
    }
  }
  FeatureMatrix fm;
  fm.column_names = enc.feature_names;
  fm.values = Matrix(ds.size(), enc.n_features());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    auto out = fm.values.row(r);
    std::size_t k = 0;
    for (const auto& e : enc.columns) {
      const auto& cell = ds.rows[r][e.column];
      switch (e.method) {
        case ColumnEncoding::Method::one_hot: {
          std::size_t slot = e.categories.size();
          if (const auto* cat = std::get_if<Category>(&cell)) {
            auto it = std::lower_bound(e.categories.begin(), e.categories.end(), cat->value);
            if (it != e.categories.end() && *it == cat->value) {
              slot = static_cast<std::size_t>(it - e.categories.begin());
            }
          }
          for (std::size_t s = 0; s <= e.categories.size(); ++s) out[k + s] = s == slot ? 1.0 : 0.0;
          k += e.categories.size() + 1;
          break;
        }
        case ColumnEncoding::Method::z_score: {
          const auto* v = std::get_if<double>(&cell);
          const double x = v ? *v : e.median;
          out[k++] = e.sd > 0.0 ? (x - e.mean) / e.sd : 0.0;
          break;
        }
        case ColumnEncoding::Method::min_max: {
          const auto* v = std::get_if<double>(&cell);
          const double x = v ? *v : e.median;
          const double span = e.max - e.min;
          out[k++] = span > 0.0 ? std::clamp((x - e.min) / span, 0.0, 1.0) : 0.0;
          break;
        }
      }
    }
  }
  return fm;
}

Dataset derive_age(const Dataset& ds, std::string_view birth_col, std::string_view derivation_col,
                   Warnings* warnings) {
  const auto birth = ds.schema.index_of(birth_col);
  const auto derivation = ds.schema.index_of(derivation_col);
  if (!birth || !derivation) {
    throw Error(ErrorCode::UnknownColumn, "date columns '" + std::string(birth_col) + "'/'" +
                                              std::string(derivation_col) + "' not in schema");
  }
  if (ds.schema[*birth].kind != ColumnKind::date || ds.schema[*derivation].kind != ColumnKind::date) {
    throw Error(ErrorCode::UnknownColumn, "age derivation needs two date columns");
  }
  ColumnSpec age{.name = std::string(kAgeColumn),
                 .kind = ColumnKind::numeric,
                 .applicability = Applicability::common};
  Dataset out = ds;
  out.schema = ds.schema.with_column(age);
  std::size_t negative = 0;
  for (auto& row : out.rows) {
    const auto* b = std::get_if<Date>(&row[*birth]);
    const auto* d = std::get_if<Date>(&row[*derivation]);
    Cell value = Missing{};
    if (b && d) {
      const auto days = (std::chrono::sys_days{*d} - std::chrono::sys_days{*b}).count();
      if (days < 0) {
        ++negative;
      } else {
        value = static_cast<double>(days);
      }
    }
    row.push_back(value);
  }
  if (negative && warnings) {
    warnings->push_back(std::to_string(negative) +
                        " rows have a birth date after the derivation date; age set missing");
  }
  return out;
}

BirthsTable load_births(const std::filesystem::path& path) {
  const auto records = csv::read_file(path);
  if (records.empty() || records.front().fields != std::vector<std::string>{"department", "births"}) {
    throw Error(ErrorCode::HeaderMismatch, path.string() + ": expected header 'department,births'");
  }
  BirthsTable table;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 2) {
      throw Error(ErrorCode::RaggedRow, path.string() + ": line " + std::to_string(records[i].line));
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(f[1], &used);
      if (used != f[1].size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
      table[f[0]] = v;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError,
                  path.string() + ": line " + std::to_string(records[i].line) + ": bad births count");
    }
  }
  return table;
}

Dataset join_births(const Dataset& ds, const BirthsTable& births, Warnings* warnings) {
  const auto dept = ds.schema.department_index();
  if (!dept) throw Error(ErrorCode::MissingDepartmentColumn, "dataset has no department column");
  Dataset out = ds;
  out.schema = ds.schema.with_column(ColumnSpec{.name = std::string(kBirthsColumn),
                                                .kind = ColumnKind::numeric,
                                                .applicability = Applicability::common});
  std::set<std::string> unknown;
  for (auto& row : out.rows) {
    Cell value = Missing{};
    if (const auto* cat = std::get_if<Category>(&row[*dept])) {
      if (auto it = births.find(cat->value); it != births.end()) {
        value = it->second;
      } else {
        unknown.insert(cat->value);
      }
    }
    row.push_back(value);
  }
  if (warnings) {
    for (const auto& u : unknown) {
      warnings->push_back("department '" + u + "' missing from births table; births set missing");
    }
  }
  return out;
}

SplitIndices stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test_fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorCode::SingleClass, "stratified split needs both classes");
  }
  Rng rng(seed);
  SplitIndices split;
  for (auto& members : by_class) {
    rng.shuffle(std::span(members));
    const auto n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(members.size()) * test_fraction + 0.5));
    split.test.insert(split.test.end(), members.begin(), members.begin() + n_test);
    split.train.insert(split.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace screenml
