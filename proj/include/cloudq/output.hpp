#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cloudq/metrics.hpp"

namespace cloudq {

/// One load level of a sweep.
struct RejectionRow {
  std::uint64_t submitted = 0;
  std::uint64_t rejected = 0;
};

RejectionRow rejection_row(const RunMetrics& metrics);

// CSV renderers. UTF-8, '\n' line endings, '.' decimals, shortest
// round-trip number formatting. Times are in the scenario's own unit.
std::string render_summary_csv(const RunMetrics& metrics);
std::string render_rejections_csv(std::span<const RejectionRow> rows);
std::string render_jobs_csv(const RunMetrics& metrics);
std::string render_starvation_csv(const RunMetrics& metrics, Duration threshold);

enum class PlotKind { HourlyResponse, RejectionsBar };

/// Throws UnknownKind.
PlotKind parse_plot_kind(std::string_view name);
std::string_view to_string(PlotKind kind) noexcept;

using Series = std::vector<std::pair<double, double>>;
/// Series name -> points, ordered by name.
using PlotSeries = std::map<std::string, Series>;

/// HourlyResponse: per user base (explicit jobs under "explicit"), average
/// network response time of completed jobs bucketed by arrival hour.
/// RejectionsBar: one "rejections" series of (submitted, rejected) per run,
/// in the order given.
PlotSeries emit_plot_series(std::span<const RunMetrics> runs, PlotKind kind);

/// Two-column "x,y" CSV of one series.
std::string render_series_csv(const Series& series, std::string_view x_name,
                              std::string_view y_name);

/// Collects output files in memory, then writes each to a temporary name
/// and renames them into `dir` only after every write succeeded.
class OutputSet {
 public:
  void add(std::string name, std::string content);
  /// Throws IoError; on failure no final file is touched.
  void commit(const std::filesystem::path& dir) const;
  const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

/// summary.csv, rejections.csv and jobs.csv for one run.
OutputSet metrics_files(const RunMetrics& metrics);

/// Writes metrics_files(metrics) into `dir`. Throws IoError.
void write_metrics_csv(const RunMetrics& metrics, const std::filesystem::path& dir);

/// Hourly response series files plus starvation.csv when the run has a
/// threshold, for one run.
void add_run_extras(OutputSet& out, const RunMetrics& metrics);

/// Number formatting shared by every writer.
std::string format_number(double value);

}  // namespace cloudq
