#include "screenml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "screenml/csv.hpp"

namespace screenml {

std::optional<Typology> typology_from_code(int code) {
  switch (code) {
    case 1:
    case 2:
    case 3:
    case 4:
    case 5:
    case 99:
      return static_cast<Typology>(code);
    default:
      return std::nullopt;
  }
}

bool in_children_segment(Typology t) {
  return t == Typology::child || t == Typology::two_children || t == Typology::pregnant_and_child ||
         t == Typology::pregnant_and_two_children;
}

bool in_pregnant_segment(Typology t) {
  return t == Typology::pregnant || t == Typology::pregnant_and_child ||
         t == Typology::pregnant_and_two_children;
}

const std::map<Typology, std::size_t>& reference_typology_counts() {
  static const std::map<Typology, std::size_t> counts{
      {Typology::pregnant, 6677},
      {Typology::child, 7154},
      {Typology::two_children, 498},
      {Typology::pregnant_and_child, 60},
      {Typology::pregnant_and_two_children, 840},
      {Typology::unknown, 207},
  };
  return counts;
}

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::date: return "date";
    case ColumnKind::binary: return "binary";
    case ColumnKind::label: return "label";
    case ColumnKind::typology: return "typology";
    case ColumnKind::department: return "department";
  }
  return "numeric";
}

std::string_view to_string(Applicability a) {
  switch (a) {
    case Applicability::child: return "child";
    case Applicability::pregnant: return "pregnant";
    case Applicability::common: return "common";
  }
  return "common";
}

namespace {

ColumnKind kind_from_string(const std::string& s) {
  for (auto k : {ColumnKind::categorical, ColumnKind::numeric, ColumnKind::date, ColumnKind::binary,
                 ColumnKind::label, ColumnKind::typology, ColumnKind::department}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidSchema, "unknown column kind '" + s + "'");
}

Applicability applicability_from_string(const std::string& s) {
  for (auto a : {Applicability::child, Applicability::pregnant, Applicability::common}) {
    if (to_string(a) == s) return a;
  }
  throw Error(ErrorCode::InvalidSchema, "unknown applicability '" + s + "'");
}

std::optional<double> parse_number(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

bool ColumnSpec::is_missing_code(std::string_view raw) const {
  return std::find(missing_codes.begin(), missing_codes.end(), raw) != missing_codes.end();
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  std::size_t labels = 0;
  std::size_t typologies = 0;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw Error(ErrorCode::InvalidSchema, "column with empty name");
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate column '" + c.name + "'");
    }
    const bool categorical = c.kind == ColumnKind::categorical;
    if (categorical == c.allowed_categories.empty()) {
      throw Error(ErrorCode::InvalidSchema,
                  "column '" + c.name + "': allowed_categories must be non-empty iff categorical");
    }
    labels += c.kind == ColumnKind::label;
    typologies += c.kind == ColumnKind::typology;
  }
  if (labels != 1) throw Error(ErrorCode::InvalidSchema, "schema needs exactly one label column");
  if (typologies != 1) {
    throw Error(ErrorCode::InvalidSchema, "schema needs exactly one typology column");
  }
  index_special_columns();
}

void Schema::index_special_columns() {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].kind == ColumnKind::label) label_index_ = i;
    if (columns_[i].kind == ColumnKind::typology) typology_index_ = i;
  }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::department_index() const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].kind == ColumnKind::department) return i;
  }
  return std::nullopt;
}

Schema Schema::with_column(ColumnSpec spec) const {
  auto cols = columns_;
  cols.push_back(std::move(spec));
  return Schema(std::move(cols));
}

Schema Schema::without_columns(const std::vector<std::size_t>& drop) const {
  std::vector<ColumnSpec> cols;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) cols.push_back(columns_[i]);
  }
  return Schema(std::move(cols));
}

nlohmann::json Schema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    nlohmann::json j{{"name", c.name},
                     {"kind", std::string(to_string(c.kind))},
                     {"applicability", std::string(to_string(c.applicability))},
                     {"missing_codes", c.missing_codes}};
    if (c.kind == ColumnKind::categorical) j["allowed_categories"] = c.allowed_categories;
    if (c.kind == ColumnKind::label) j["positive_value"] = c.positive_value;
    cols.push_back(std::move(j));
  }
  return {{"columns", cols}};
}

Schema Schema::from_json(const nlohmann::json& doc) {
  try {
    std::vector<ColumnSpec> cols;
    for (const auto& j : doc.at("columns")) {
      ColumnSpec c;
      c.name = j.at("name").get<std::string>();
      c.kind = kind_from_string(j.at("kind").get<std::string>());
      c.applicability = applicability_from_string(j.value("applicability", std::string("common")));
      c.allowed_categories = j.value("allowed_categories", std::vector<std::string>{});
      c.missing_codes = j.value("missing_codes", std::vector<std::string>{""});
      c.positive_value = j.value("positive_value", std::string("1"));
      cols.push_back(std::move(c));
    }
    return Schema(std::move(cols));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, e.what());
  }
}

Schema Schema::load(const std::filesystem::path& path) {
  const auto text = csv::read_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, path.string() + ": " + e.what());
  }
  return from_json(doc);
}

void Schema::save(const std::filesystem::path& path) const {
  csv::write_text(path, to_json().dump(2) + "\n");
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{} && ptr == text.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

bool compatible(const ColumnSpec& spec, const Cell& cell) {
  if (is_missing(cell)) return true;
  switch (spec.kind) {
    case ColumnKind::categorical:
      return std::holds_alternative<Category>(cell) &&
             std::find(spec.allowed_categories.begin(), spec.allowed_categories.end(),
                       std::get<Category>(cell).value) != spec.allowed_categories.end();
    case ColumnKind::department:
    case ColumnKind::label:
      return std::holds_alternative<Category>(cell);
    case ColumnKind::numeric:
      return std::holds_alternative<double>(cell) && std::isfinite(std::get<double>(cell));
    case ColumnKind::binary:
      return std::holds_alternative<double>(cell) &&
             (std::get<double>(cell) == 0.0 || std::get<double>(cell) == 1.0);
    case ColumnKind::typology:
      return std::holds_alternative<double>(cell);
    case ColumnKind::date:
      return std::holds_alternative<Date>(cell) && std::get<Date>(cell).ok();
  }
  return false;
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Missing>) {
          return "";
        } else if constexpr (std::is_same_v<T, Category>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else {
          return format_date(v);
        }
      },
      cell);
}

[[noreturn]] void parse_failure(std::size_t line, const ColumnSpec& spec, const std::string& raw,
                                const char* why) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column '" + spec.name +
                                         "': " + why + " ('" + raw + "')");
}

Cell parse_cell(const ColumnSpec& spec, const std::string& raw, std::size_t line) {
  if (spec.is_missing_code(raw)) {
    if (spec.kind == ColumnKind::label) parse_failure(line, spec, raw, "label is mandatory");
    return Missing{};
  }
  switch (spec.kind) {
    case ColumnKind::categorical:
      if (std::find(spec.allowed_categories.begin(), spec.allowed_categories.end(), raw) ==
          spec.allowed_categories.end()) {
        parse_failure(line, spec, raw, "category not allowed");
      }
      return Category{raw};
    case ColumnKind::department:
    case ColumnKind::label:
      return Category{raw};
    case ColumnKind::numeric: {
      auto v = parse_number(raw);
      if (!v) parse_failure(line, spec, raw, "not a finite number");
      return *v;
    }
    case ColumnKind::binary: {
      auto v = parse_number(raw);
      if (!v || (*v != 0.0 && *v != 1.0)) parse_failure(line, spec, raw, "binary must be 0 or 1");
      return *v;
    }
    case ColumnKind::typology: {
      auto v = parse_number(raw);
      if (!v || *v != std::floor(*v) || !typology_from_code(static_cast<int>(*v))) {
        parse_failure(line, spec, raw, "unknown typology code");
      }
      if (*v == 99.0) return Missing{};
      return *v;
    }
    case ColumnKind::date: {
      auto d = parse_date(raw);
      if (!d) parse_failure(line, spec, raw, "not an ISO-8601 date");
      return *d;
    }
  }
  return Missing{};
}

Typology typology_of(const Cell& cell) {
  if (is_missing(cell)) return Typology::unknown;
  return *typology_from_code(static_cast<int>(std::get<double>(cell)));
}

}  // namespace

void Dataset::validate() const {
  if (labels.size() != rows.size() || typologies.size() != rows.size()) {
    throw Error(ErrorCode::DimensionMismatch, "labels/typologies length differs from row count");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      throw Error(ErrorCode::RaggedRow, "row " + std::to_string(r) + " has wrong width");
    }
    if (labels[r] != 0 && labels[r] != 1) {
      throw Error(ErrorCode::ParseError, "non-binary label at row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (!compatible(schema[c], rows[r][c])) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + ", column '" +
                                               schema[c].name + "': incompatible cell");
      }
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.schema = schema;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  out.typologies.reserve(indices.size());
  for (auto i : indices) {
    out.rows.push_back(rows[i]);
    out.labels.push_back(labels[i]);
    out.typologies.push_back(typologies[i]);
  }
  return out;
}

Dataset parse_csv(std::string_view text, const Schema& schema) {
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorCode::HeaderMismatch, "missing header line");
  const auto& header = records.front().fields;
  bool header_ok = header.size() == schema.size();
  for (std::size_t i = 0; header_ok && i < header.size(); ++i) {
    header_ok = header[i] == schema[i].name;
  }
  if (!header_ok) {
    std::string expected;
    for (const auto& c : schema.columns()) expected += (expected.empty() ? "" : ",") + c.name;
    throw Error(ErrorCode::HeaderMismatch, "expected header '" + expected + "'");
  }

  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(records.size() - 1);
  const auto label_col = schema.label_index();
  const auto typology_col = schema.typology_index();
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != schema.size()) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(rec.line) + ": expected " +
                                            std::to_string(schema.size()) + " cells, got " +
                                            std::to_string(rec.fields.size()));
    }
    Row row;
    row.reserve(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      row.push_back(parse_cell(schema[c], rec.fields[c], rec.line));
    }
    ds.labels.push_back(std::get<Category>(row[label_col]).value == schema[label_col].positive_value);
    ds.typologies.push_back(typology_of(row[typology_col]));
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  try {
    return parse_csv(csv::read_text(path), schema);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  std::vector<std::string> fields;
  for (const auto& c : ds.schema.columns()) fields.push_back(c.name);
  csv::write_record(out, fields);
  for (const auto& row : ds.rows) {
    fields.clear();
    for (const auto& cell : row) fields.push_back(cell_text(cell));
    csv::write_record(out, fields);
  }
  return out.str();
}

void save_csv(const std::filesystem::path& path, const Dataset& ds) {
  csv::write_text(path, to_csv(ds));
}

Segmentation segment(const Dataset& ds) {
  std::vector<std::size_t> children;
  std::vector<std::size_t> pregnant;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (in_children_segment(ds.typologies[i])) children.push_back(i);
    if (in_pregnant_segment(ds.typologies[i])) pregnant.push_back(i);
  }
  return {ds.subset(children), ds.subset(pregnant)};
}

std::vector<std::string> reconcile_segments(const Segmentation& seg,
                                            const ReferenceSegmentCounts& reference) {
  std::vector<std::string> notes;
  auto check = [&](const char* name, std::size_t got, std::size_t want) {
    if (got != want) {
      notes.push_back(std::string(name) + " segment has " + std::to_string(got) +
                      " rows; reference count is " + std::to_string(want));
    }
  };
  check("children (BD1)", seg.children.size(), reference.children);
  check("pregnant (BD2)", seg.pregnant.size(), reference.pregnant);
  return notes;
}

Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> drop;
  for (const auto& n : names) {
    if (auto i = ds.schema.index_of(n)) drop.push_back(*i);
  }
  if (drop.empty()) return ds;
  Dataset out;
  out.schema = ds.schema.without_columns(drop);
  out.labels = ds.labels;
  out.typologies = ds.typologies;
  out.rows.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    Row kept;
    kept.reserve(out.schema.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::find(drop.begin(), drop.end(), c) == drop.end()) kept.push_back(row[c]);
    }
    out.rows.push_back(std::move(kept));
  }
  return out;
}

Dataset drop_inapplicable(const Dataset& ds, SegmentKind segment) {
  const auto keep = segment == SegmentKind::children ? Applicability::child : Applicability::pregnant;
  std::vector<std::string> drop;
  for (const auto& c : ds.schema.columns()) {
    if (c.applicability != keep && c.applicability != Applicability::common) drop.push_back(c.name);
  }
  return drop_columns(ds, drop);
}

std::map<Typology, std::size_t> summarize(const Dataset& ds) {
  std::map<Typology, std::size_t> counts;
  for (auto t : ds.typologies) ++counts[t];
  return counts;
}

}  // namespace screenml
