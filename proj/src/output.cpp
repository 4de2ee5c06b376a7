#include "cloudq/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cloudq/error.hpp"

namespace cloudq {

std::string format_number(double value) {
  if (value == 0) value = 0;  // no "-0"
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

RejectionRow rejection_row(const RunMetrics& metrics) {
  return {metrics.submitted, metrics.rejected};
}

namespace {

std::string in_unit(double ms, TimeUnit unit) { return format_number(from_ms(ms, unit)); }

std::string optional_time(const std::optional<SimTime>& t, TimeUnit unit) {
  return t ? in_unit(*t, unit) : std::string();
}

}  // namespace

std::string render_summary_csv(const RunMetrics& metrics) {
  std::ostringstream out;
  out << "metric,avg,min,max,count\n";
  for (const NamedSummary& row : summary_rows(metrics)) {
    out << row.metric << "," << in_unit(row.stats.avg, metrics.time_unit) << ","
        << in_unit(row.stats.min, metrics.time_unit) << ","
        << in_unit(row.stats.max, metrics.time_unit) << "," << row.stats.count << "\n";
  }
  return out.str();
}

std::string render_rejections_csv(std::span<const RejectionRow> rows) {
  std::ostringstream out;
  out << "submitted,rejected,percent\n";
  for (const RejectionRow& r : rows) {
    out << r.submitted << "," << r.rejected << ",";
    if (r.submitted > 0) out << rejection_percentage(r.submitted, r.rejected);
    out << "\n";
  }
  return out.str();
}

std::string render_jobs_csv(const RunMetrics& metrics) {
  const TimeUnit u = metrics.time_unit;
  std::ostringstream out;
  out << "id,arrival,start,finish,wait,vm_history,state\n";
  for (const JobTrace& t : metrics.jobs) {
    out << t.id << "," << in_unit(t.arrival, u) << "," << optional_time(t.start, u) << ","
        << optional_time(t.finish, u) << ",";
    if (t.start) out << in_unit(queue_wait(t), u);
    out << ",";
    for (std::size_t i = 0; i < t.vm_history.size(); ++i) {
      out << (i ? ";" : "") << t.datacenter << "." << t.vm_history[i];
    }
    out << "," << to_string(t.state) << "\n";
  }
  return out.str();
}

std::string render_starvation_csv(const RunMetrics& metrics, Duration threshold) {
  std::ostringstream out;
  out << "id,wait\n";
  for (const StarvationEntry& e : starvation_report(metrics.jobs, threshold)) {
    out << e.id << "," << in_unit(e.wait, metrics.time_unit) << "\n";
  }
  return out.str();
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "hourly_response") return PlotKind::HourlyResponse;
  if (name == "rejections_bar") return PlotKind::RejectionsBar;
  throw UnknownKind("unknown plot kind '" + std::string(name) + "'");
}

std::string_view to_string(PlotKind kind) noexcept {
  return kind == PlotKind::HourlyResponse ? "hourly_response" : "rejections_bar";
}

PlotSeries emit_plot_series(std::span<const RunMetrics> runs, PlotKind kind) {
  PlotSeries out;
  if (kind == PlotKind::RejectionsBar) {
    for (const RunMetrics& m : runs) {
      if (m.submitted == 0) continue;
      out["rejections"].emplace_back(static_cast<double>(m.submitted),
                                     static_cast<double>(m.rejected));
    }
    return out;
  }

  for (const RunMetrics& m : runs) {
    // series -> hour -> (sum, count)
    std::map<std::string, std::map<long long, std::pair<long double, std::size_t>>> buckets;
    for (const JobTrace& t : m.jobs) {
      if (t.state != JobState::Completed) continue;
      const auto hour = static_cast<long long>(std::floor(t.arrival / kMsPerHour));
      auto& [sum, count] = buckets[t.origin_ub.empty() ? "explicit" : t.origin_ub][hour];
      sum += network_response_time(t);
      ++count;
    }
    for (const auto& [name, hours] : buckets) {
      Series& s = out[name];
      for (const auto& [hour, acc] : hours) {
        const double avg = static_cast<double>(acc.first / acc.second);
        s.emplace_back(static_cast<double>(hour), from_ms(avg, m.time_unit));
      }
    }
  }
  return out;
}

std::string render_series_csv(const Series& series, std::string_view x_name,
                              std::string_view y_name) {
  std::ostringstream out;
  out << x_name << "," << y_name << "\n";
  for (const auto& [x, y] : series) out << format_number(x) << "," << format_number(y) << "\n";
  return out.str();
}

void OutputSet::add(std::string name, std::string content) {
  files_.emplace_back(std::move(name), std::move(content));
}

void OutputSet::commit(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<fs::path> staged;
  auto cleanup = [&] {
    for (const fs::path& p : staged) fs::remove(p, ec);
  };
  for (const auto& [name, content] : files_) {
    const fs::path tmp = dir / ("." + name + ".tmp");
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    staged.push_back(tmp);
    if (!f) {
      cleanup();
      throw IoError("cannot write " + tmp.string());
    }
  }
  for (const auto& [name, content] : files_) {
    const fs::path target = dir / name;
    if (fs::exists(target, ec) && !fs::is_regular_file(target, ec)) {
      cleanup();
      throw IoError("cannot replace " + target.string() + ": not a regular file");
    }
  }
  for (std::size_t i = 0; i < files_.size(); ++i) {
    fs::rename(staged[i], dir / files_[i].first, ec);
    if (ec) {
      const std::string why = ec.message();
      cleanup();
      for (std::size_t k = 0; k < i; ++k) fs::remove(dir / files_[k].first, ec);
      throw IoError("cannot rename into " + (dir / files_[i].first).string() + ": " + why);
    }
  }
}

OutputSet metrics_files(const RunMetrics& metrics) {
  OutputSet out;
  out.add("summary.csv", render_summary_csv(metrics));
  const std::vector<RejectionRow> rows =
      metrics.submitted > 0 ? std::vector<RejectionRow>{rejection_row(metrics)}
                            : std::vector<RejectionRow>{};
  out.add("rejections.csv", render_rejections_csv(rows));
  out.add("jobs.csv", render_jobs_csv(metrics));
  return out;
}

void write_metrics_csv(const RunMetrics& metrics, const std::filesystem::path& dir) {
  metrics_files(metrics).commit(dir);
}

void add_run_extras(OutputSet& out, const RunMetrics& metrics) {
  const RunMetrics* one = &metrics;
  const std::string y = std::string("avg_response_") + std::string(to_string(metrics.time_unit));
  for (const auto& [name, series] : emit_plot_series({one, 1}, PlotKind::HourlyResponse)) {
    out.add("hourly_response_" + name + ".csv", render_series_csv(series, "hour", y));
  }
  if (metrics.starvation_threshold) {
    out.add("starvation.csv", render_starvation_csv(metrics, *metrics.starvation_threshold));
  }
}

}  // namespace cloudq
