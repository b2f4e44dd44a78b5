#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "screenml/matrix.hpp"

namespace screenml {

/// Household composition of a referral case. 99 is the "no data" code.
enum class Typology : int {
  pregnant = 1,
  child = 2,
  two_children = 3,
  pregnant_and_child = 4,
  pregnant_and_two_children = 5,
  unknown = 99,
};

std::optional<Typology> typology_from_code(int code);
inline int code(Typology t) { return static_cast<int>(t); }

/// Children segment: typologies 2, 3, 4, 5.
bool in_children_segment(Typology t);
/// Pregnant-women segment: typologies 1, 4, 5.
bool in_pregnant_segment(Typology t);

/// Case counts per typology for the reference corpus (sums to 15436).
const std::map<Typology, std::size_t>& reference_typology_counts();

struct ReferenceSegmentCounts {
  std::size_t children = 7583;
  std::size_t pregnant = 7577;
};

enum class ColumnKind { categorical, numeric, date, binary, label, typology, department };
enum class Applicability { child, pregnant, common };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Applicability a);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  Applicability applicability = Applicability::common;
  std::vector<std::string> allowed_categories;  // categorical only
  std::vector<std::string> missing_codes{""};
  std::string positive_value = "1";              // label only: raw value meaning "accepted"

  bool is_missing_code(std::string_view raw) const;
  bool operator==(const ColumnSpec&) const = default;
};

class Schema {
 public:
  Schema() = default;
  /// Validates the column invariants; throws InvalidSchema.
  explicit Schema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t label_index() const { return label_index_; }
  std::size_t typology_index() const { return typology_index_; }
  std::optional<std::size_t> department_index() const;

  /// Validation is skipped: callers guarantee the invariants are preserved.
  Schema with_column(ColumnSpec spec) const;
  Schema without_columns(const std::vector<std::size_t>& drop) const;

  bool operator==(const Schema& other) const { return columns_ == other.columns_; }

  nlohmann::json to_json() const;
  static Schema from_json(const nlohmann::json& doc);
  static Schema load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  void index_special_columns();

  std::vector<ColumnSpec> columns_;
  std::size_t label_index_ = 0;
  std::size_t typology_index_ = 0;
};

struct Missing {
  bool operator==(const Missing&) const = default;
};
struct Category {
  std::string value;
  bool operator==(const Category&) const = default;
};
using Date = std::chrono::year_month_day;

using Cell = std::variant<Missing, Category, double, Date>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }

std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);
std::string format_number(double v);

using Row = std::vector<Cell>;

struct Dataset {
  Schema schema;
  std::vector<Row> rows;
  Labels labels;
  std::vector<Typology> typologies;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }

  /// Checks row widths, label/typology lengths and cell-kind compatibility.
  void validate() const;

  /// Rows at the given indices, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  bool operator==(const Dataset&) const = default;
};

Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset parse_csv(std::string_view text, const Schema& schema);
std::string to_csv(const Dataset& ds);
void save_csv(const std::filesystem::path& path, const Dataset& ds);

struct Segmentation {
  Dataset children;  // BD1
  Dataset pregnant;  // BD2
};

/// Typology 4/5 rows go to both segments; typology 99 rows to neither.
Segmentation segment(const Dataset& ds);

/// Human-readable notes wherever the segment sizes disagree with the reference.
std::vector<std::string> reconcile_segments(const Segmentation& seg,
                                            const ReferenceSegmentCounts& reference = {});

enum class SegmentKind { children, pregnant };

/// Removes columns that belong to the other segment.
Dataset drop_inapplicable(const Dataset& ds, SegmentKind segment);

Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names);

std::map<Typology, std::size_t> summarize(const Dataset& ds);

}  // namespace screenml
