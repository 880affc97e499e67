#include "webtb/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace webtb::stats {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string point_column(double p) { return fmt::format("p{:g}", p); }

}  // namespace

std::string format_sig4(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  return fmt::format("{:.4g}", v);
}

std::string render_percentiles_csv(const std::vector<PercentileTable>& tables) {
  std::set<double> all_points;
  for (const auto& t : tables) all_points.insert(t.points.begin(), t.points.end());
  std::string out = "metric";
  for (double p : all_points) out += "," + point_column(p);
  out += "\n";
  for (const auto& t : tables) {
    out += csv_field(t.metric);
    for (double p : all_points) {
      out += ",";
      const auto it = std::find(t.points.begin(), t.points.end(), p);
      if (it != t.points.end()) out += format_sig4(t.values[static_cast<std::size_t>(it - t.points.begin())]);
    }
    out += "\n";
  }
  return out;
}

std::string render_comparisons_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "metric,group_a,group_b,ratio\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", csv_field(r.metric), format_sig4(r.group_a),
                       format_sig4(r.group_b), r.ratio ? format_sig4(*r.ratio) : "undefined");
  }
  return out;
}

std::string render_json(const std::vector<PercentileTable>& tables, const std::vector<ComparisonRow>& rows) {
  // Numbers go through the 4-significant-digit rendering and back, so JSON and CSV agree.
  auto num = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return format_sig4(v);
    return std::stod(format_sig4(v));
  };
  nlohmann::ordered_json doc;
  doc["percentiles"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    nlohmann::ordered_json jt;
    jt["metric"] = t.metric;
    for (std::size_t i = 0; i < t.points.size(); ++i) jt[point_column(t.points[i])] = num(t.values[i]);
    doc["percentiles"].push_back(std::move(jt));
  }
  doc["comparisons"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json jr;
    jr["metric"] = r.metric;
    jr["group_a"] = num(r.group_a);
    jr["group_b"] = num(r.group_b);
    jr["ratio"] = r.ratio ? nlohmann::ordered_json(num(*r.ratio)) : nlohmann::ordered_json(nullptr);
    doc["comparisons"].push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
}

std::vector<std::filesystem::path> emit_report(const std::vector<PercentileTable>& tables,
                                               const std::vector<ComparisonRow>& rows,
                                               ReportFormat format,
                                               const std::filesystem::path& out_dir,
                                               const std::string& stem) {
  if (tables.empty() && rows.empty()) throw std::invalid_argument("nothing to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::json) {
    written.push_back(out_dir / (stem + ".json"));
    write_file_atomic(written.back(), render_json(tables, rows));
    return written;
  }
  if (!tables.empty()) {
    written.push_back(out_dir / (stem + "_percentiles.csv"));
    write_file_atomic(written.back(), render_percentiles_csv(tables));
  }
  if (!rows.empty()) {
    written.push_back(out_dir / (stem + "_comparisons.csv"));
    write_file_atomic(written.back(), render_comparisons_csv(rows));
  }
  return written;
}

}  // namespace webtb::stats
