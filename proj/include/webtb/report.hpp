#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "webtb/stats.hpp"

namespace webtb::stats {

enum class ReportFormat { csv, json };

/// Renders a number with 4 significant digits.
std::string format_sig4(double v);

std::string render_percentiles_csv(const std::vector<PercentileTable>& tables);
std::string render_comparisons_csv(const std::vector<ComparisonRow>& rows);
std::string render_json(const std::vector<PercentileTable>& tables, const std::vector<ComparisonRow>& rows);

/// Writes `<stem>_percentiles.csv` / `<stem>_comparisons.csv` (csv) or `<stem>.json` into
/// `out_dir` and returns the written paths. Output is a pure function of the input.
/// Throws std::invalid_argument when there is nothing to emit and
/// std::runtime_error when a file cannot be written.
std::vector<std::filesystem::path> emit_report(const std::vector<PercentileTable>& tables,
                                               const std::vector<ComparisonRow>& rows,
                                               ReportFormat format,
                                               const std::filesystem::path& out_dir,
                                               const std::string& stem = "report");

/// Writes text to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace webtb::stats
