#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "screenml/csv.hpp"
#include "screenml/dataset.hpp"
#include "screenml/experiment.hpp"

namespace screenml {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::ParseError, where + ": not a number '" + text + "'");
}

}  // namespace

std::string slugify(std::string_view text) {
  std::string out;
  bool dash = false;
  for (unsigned char c : text) {
    if (std::isalnum(c) && c < 0x80) {
      if (dash && !out.empty()) out += '-';
      out += static_cast<char>(std::tolower(c));
      dash = false;
    } else {
      dash = true;
    }
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  std::vector<std::string> header(kMetricsColumns.begin(), kMetricsColumns.end());
  header.insert(header.end(), kMetricsExtraColumns.begin(), kMetricsExtraColumns.end());
  csv::write_record(out, header);
  for (const auto& r : records) {
    csv::write_record(out, {r.row.algorithm, r.row.adjustments, format_number(r.row.threshold),
                            format_number(r.row.precision), format_number(r.row.recall),
                            format_number(r.row.f1), format_number(r.row.accuracy), r.segment,
                            r.row_type, r.objective, r.fallback ? "1" : "0",
                            r.auc ? format_number(*r.auc) : std::string{}});
  }
  return out.str();
}

std::vector<MetricsRecord> parse_metrics_csv(std::string_view text, const std::string& source) {
  const auto records = csv::parse(text);
  const std::string where = source.empty() ? std::string("metrics") : source;
  if (records.empty() || records.front().fields.size() < kMetricsColumns.size() ||
      !std::equal(kMetricsColumns.begin(), kMetricsColumns.end(), records.front().fields.begin())) {
    throw Error(ErrorCode::SchemaMismatch,
                where + ": header must start with algorithm,adjustments,threshold,precision,recall,f1,accuracy");
  }
  const auto& header = records.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto segment = column("segment");
  const auto row_type = column("row_type");
  const auto objective = column("objective");
  const auto fallback = column("fallback");
  const auto auc = column("auc");

  std::vector<MetricsRecord> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    const auto at = where + ": line " + std::to_string(records[i].line);
    if (f.size() != header.size()) throw Error(ErrorCode::RaggedRow, at + ": wrong field count");
    MetricsRecord r;
    r.row = {f[0],
             f[1],
             parse_double(f[2], at),
             parse_double(f[3], at),
             parse_double(f[4], at),
             parse_double(f[5], at),
             parse_double(f[6], at)};
    if (segment) r.segment = f[*segment];
    if (row_type) r.row_type = f[*row_type];
    if (objective) r.objective = f[*objective];
    if (fallback) r.fallback = f[*fallback] == "1";
    if (auc && !f[*auc].empty()) r.auc = parse_double(f[*auc], at);
    out.push_back(std::move(r));
  }
  return out;
}

std::string render_table(const std::vector<MetricsRecord>& records) {
  std::ostringstream out;
  out << "| Algoritmo | Ajustes | Umbral | Precisión | Recall | F1-score | Accuracy |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : records) {
    out << "| " << r.row.algorithm << " | " << r.row.adjustments << " | " << fixed(r.row.threshold, 2)
        << " | " << fixed(r.row.precision, 4) << " | " << fixed(r.row.recall, 4) << " | "
        << fixed(r.row.f1, 4) << " | " << fixed(r.row.accuracy, 4) << " |\n";
  }
  return out.str();
}

std::string cmd_report(const std::vector<std::filesystem::path>& metrics_paths) {
  std::vector<MetricsRecord> rows;
  for (const auto& p : metrics_paths) {
    for (auto& r : parse_metrics_csv(csv::read_text(p), p.string())) {
      if (r.row_type.empty() || r.row_type == "best") rows.push_back(std::move(r));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
    return std::tie(a.segment, a.row.algorithm) < std::tie(b.segment, b.row.algorithm);
  });

  std::ostringstream out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].segment == rows[i].segment) ++j;
    if (i > 0) out << '\n';
    if (!rows[i].segment.empty()) out << "## " << rows[i].segment << "\n\n";
    out << render_table({rows.begin() + static_cast<std::ptrdiff_t>(i), rows.begin() + static_cast<std::ptrdiff_t>(j)});
    i = j;
  }
  if (rows.empty()) out << render_table({});
  return out.str();
}

std::string scores_csv(std::span<const int> y, std::span<const double> scores) {
  std::string out = "label,score\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    out += std::to_string(y[i]) + "," + format_number(scores[i]) + "\n";
  }
  return out;
}

ScoredLabels load_scores(const std::filesystem::path& path) {
  const auto records = csv::read_file(path);
  if (records.empty() || records.front().fields != std::vector<std::string>{"label", "score"}) {
    throw Error(ErrorCode::HeaderMismatch, path.string() + ": expected header 'label,score'");
  }
  ScoredLabels out{path.stem().string(), {}, {}};
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    const auto at = path.string() + ": line " + std::to_string(records[i].line);
    if (f.size() != 2) throw Error(ErrorCode::RaggedRow, at);
    if (f[0] != "0" && f[0] != "1") throw Error(ErrorCode::ParseError, at + ": label must be 0 or 1");
    out.y.push_back(f[0] == "1");
    out.scores.push_back(parse_double(f[1], at));
  }
  return out;
}

std::string roc_svg(const std::vector<std::pair<std::string, RocCurve>>& curves) {
  static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr double left = 50;
  constexpr double top = 20;
  constexpr double size = 400;
  auto px = [&](double fpr) { return fixed(left + fpr * size, 2); };
  auto py = [&](double tpr) { return fixed(top + (1.0 - tpr) * size, 2); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"470\" viewBox=\"0 0 680 470\">\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"white\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
  out << "<text x=\"250\" y=\"455\" text-anchor=\"middle\" font-size=\"12\">False positive rate</text>\n";
  out << "<text x=\"15\" y=\"220\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 220)\">"
         "True positive rate</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto* color = palette[c % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[c].second.points.size(); ++i) {
      const auto& p = curves[c].second.points[i];
      out << (i ? " " : "") << px(p.fpr) << ',' << py(p.tpr);
    }
    out << "\"/>\n";
    const auto y = fixed(top + 15 + 18.0 * static_cast<double>(c), 2);
    out << "<line x1=\"465\" y1=\"" << y << "\" x2=\"485\" y2=\"" << y << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"490\" y=\"" << y << "\" dy=\"4\" font-size=\"11\">" << xml_escape(curves[c].first) << " (AUC "
        << fixed(auc(curves[c].second), 3) << ")</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace screenml
