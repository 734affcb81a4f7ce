#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavedim/sweep.hpp"

namespace wavedim {

/// Columns of summary.csv, in order.
const std::vector<std::string>& summary_columns();

std::string summary_csv(const RunRecord& record);
/// Long format: gamma, n, q.
std::string q_curves_csv(const RunRecord& record);
/// Record without timestamps, pretty-printed JSON.
std::string manifest_json(const RunRecord& record);
/// Inverse of manifest_json; timestamps are left empty.
RunRecord parse_manifest(const std::string& text);
std::string report_text(const RunRecord& record);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Log-log line plot. Non-positive or non-finite points are skipped; returns an empty
/// string when nothing is left to draw.
std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<PlotSeries>& series);

/// Dimension estimates and bounds against 1/gamma.
std::string sweep_plot_svg(const RunRecord& record);

/// Writes manifest.json, timestamps.json, summary.csv, q_curves.csv, report.txt and plot.svg
/// (when there is something to plot) into `dir`.
void emit_report(const RunRecord& record, const std::filesystem::path& dir);

/// Reads manifest.json and, when present, timestamps.json.
RunRecord load_record(const std::filesystem::path& dir);

/// Writes text to path, creating parent directories; throws Error naming the path on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

/// %.10g with NaN printed as "nan".
std::string format_number(double x);

}  // namespace wavedim
