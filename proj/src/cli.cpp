#include "cloudq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <sstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cloudq/error.hpp"
#include "cloudq/metrics.hpp"
#include "cloudq/output.hpp"
#include "cloudq/simulator.hpp"

namespace cloudq::cli {

using nlohmann::json;

ScenarioConfig apply_overrides(ScenarioConfig config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.scheduler) config.policy.scheduler = *o.scheduler;
  if (o.migration) config.policy.migration = *o.migration;
  if (o.deadline) {
    config.policy.admission.mode = AdmissionMode::Deadline;
    config.policy.admission.deadline = *o.deadline;
  }
  validate(config);
  return config;
}

ScenarioConfig resolve_scenario(const std::string& name) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name, ec)) return load_scenario_file(name);
  const std::string file = std::filesystem::path(name).filename().string();
  if (auto text = embedded_scenario(file)) return load_scenario(*text);
  throw ParseError("cannot open scenario file '" + name + "'", 0, 0);
}

std::vector<std::uint64_t> parse_levels(const std::string& text) {
  std::vector<std::uint64_t> levels;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::uint64_t v = 0;
    const char* end = item.data() + item.size();
    auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (item.empty() || ec != std::errc{} || ptr != end || v == 0) {
      throw ValidationError("sweep levels must be positive integers, got '" + item + "'");
    }
    if (!levels.empty() && v <= levels.back()) {
      throw ValidationError("sweep levels must be strictly increasing");
    }
    levels.push_back(v);
  }
  if (levels.empty() || (!text.empty() && text.back() == ',')) {
    throw ValidationError("sweep needs a comma-separated list of job counts");
  }
  return levels;
}

DemoExpectation worked_example_expectation() {
  return {{1, 4, 2, 5, 3}, {{1, 0}, {2, 9}, {3, 16}, {4, 3}, {5, 8}}};
}

namespace {

json summary_json(const RunMetrics& m) {
  json j;
  j["scenario"] = m.scenario;
  j["time_unit"] = std::string(to_string(m.time_unit));
  j["submitted"] = m.submitted;
  j["completed"] = m.completed;
  j["rejected"] = m.rejected;
  if (m.submitted > 0) j["rejection_percent"] = rejection_percentage(m.submitted, m.rejected);
  j["migrations"] = m.migrations.size();
  json stats = json::object();
  for (const NamedSummary& row : summary_rows(m)) {
    stats[row.metric] = {{"avg", from_ms(row.stats.avg, m.time_unit)},
                         {"min", from_ms(row.stats.min, m.time_unit)},
                         {"max", from_ms(row.stats.max, m.time_unit)},
                         {"count", row.stats.count}};
  }
  j["summary"] = stats;
  return j;
}

/// Runs `body` and maps library errors onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kScenarioError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace

int cmd_run(const std::string& scenario, const Overrides& overrides,
            const std::filesystem::path& out_dir, bool json_out, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = apply_overrides(resolve_scenario(scenario), overrides);
    const RunMetrics metrics = run(cfg);
    OutputSet files = metrics_files(metrics);
    add_run_extras(files, metrics);
    files.commit(out_dir);
    if (json_out) out << summary_json(metrics).dump(2) << "\n";
    return int{kOk};
  });
}

int cmd_sweep(const std::string& scenario, const std::string& levels_text,
              const Overrides& overrides, const std::filesystem::path& out_dir, bool json_out,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<std::uint64_t> levels = parse_levels(levels_text);
    const ScenarioConfig cfg = apply_overrides(resolve_scenario(scenario), overrides);
    if (!cfg.jobs.empty() || cfg.user_bases.empty()) {
      throw ValidationError("sweep needs a scenario driven only by user bases");
    }

    // Levels share nothing; results are gathered back in level order.
    std::vector<std::future<RunMetrics>> pending;
    for (std::uint64_t level : levels) {
      pending.push_back(std::async(std::launch::async, [&cfg, level] {
        RunOptions options;
        options.job_budget = level;
        return run(cfg, options);
      }));
    }
    std::vector<RunMetrics> runs;
    for (auto& f : pending) runs.push_back(f.get());

    std::vector<RejectionRow> rows;
    for (const RunMetrics& m : runs) rows.push_back(rejection_row(m));
    OutputSet files;
    files.add("rejections.csv", render_rejections_csv(rows));
    for (const auto& [name, series] : emit_plot_series(runs, PlotKind::RejectionsBar)) {
      files.add("rejections_bar.csv", render_series_csv(series, "submitted", "rejected"));
    }
    files.commit(out_dir);

    if (json_out) {
      json j = json::array();
      for (const RunMetrics& m : runs) j.push_back(summary_json(m));
      out << j.dump(2) << "\n";
    }
    return int{kOk};
  });
}

int cmd_demo(const DemoExpectation& expected, bool json_out, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = load_scenario(*embedded_scenario("table6_demo.scn"));
    const RunMetrics metrics = run(cfg);

    std::vector<const JobTrace*> started;
    for (const JobTrace& t : metrics.jobs) {
      if (t.start) started.push_back(&t);
    }
    std::stable_sort(started.begin(), started.end(),
                     [](const JobTrace* a, const JobTrace* b) { return *a->start < *b->start; });
    DemoExpectation actual;
    for (const JobTrace* t : started) {
      actual.order.push_back(t->id);
      actual.waits[t->id] = from_ms(queue_wait(*t), metrics.time_unit);
    }
    const bool match = actual.order == expected.order && actual.waits == expected.waits &&
                       metrics.submitted == expected.order.size();

    if (json_out) {
      json waits = json::object();
      for (const auto& [id, w] : actual.waits) waits[std::to_string(id)] = w;
      out << json{{"scenario", metrics.scenario},
                  {"time_unit", std::string(to_string(metrics.time_unit))},
                  {"order", actual.order},
                  {"waits", waits},
                  {"match", match}}
                 .dump(2)
          << "\n";
    } else {
      out << "order:";
      for (std::uint32_t id : actual.order) out << " " << id;
      out << "\n";
      for (std::uint32_t id : actual.order) {
        out << "job " << id << " wait " << format_number(actual.waits[id]) << " "
            << to_string(metrics.time_unit) << "\n";
      }
      out << (match ? "matches expected schedule" : "MISMATCH against expected schedule") << "\n";
    }
    if (!match) {
      err << "error: demo schedule differs from the expected table\n";
      return int{kDemoMismatch};
    }
    return int{kOk};
  });
}

int cmd_validate(const std::string& scenario, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig cfg = resolve_scenario(scenario);
    out << serialize_scenario(normalized(cfg));
    return int{kOk};
  });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete-event simulator of cloud job dispatch", "cloudq"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";
  std::string levels;
  bool json_out = false;
  Overrides overrides;
  std::optional<std::string> scheduler, migration;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario,--scenario", scenario, "Scenario file or embedded scenario name")
        ->required();
    sub->add_option("--seed", overrides.seed, "Override the scenario seed");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--scheduler", scheduler, "rr or sjf")->check(CLI::IsMember({"rr", "sjf"}));
    sub->add_option("--migration", migration, "on or off")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--deadline", overrides.deadline,
                    "Deadline admission with this deadline (scenario time unit)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--json", json_out, "Print a JSON summary to stdout");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario");
  add_common(run_cmd);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one scenario at several job counts");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--sweep", levels, "Job counts, e.g. 5,10,15,20,25,30")->required();
  CLI::App* demo_cmd = app.add_subcommand("demo", "Replay the worked shortest-job-first example");
  demo_cmd->add_flag("--json", json_out, "Print the result as JSON");
  CLI::App* validate_cmd = app.add_subcommand("validate", "Load and validate a scenario");
  validate_cmd->add_option("scenario,--scenario", scenario, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? int{kOk} : int{kScenarioError};
  }

  if (scheduler) {
    overrides.scheduler = *scheduler == "sjf" ? SchedulerKind::ShortestJobFirst : SchedulerKind::RoundRobin;
  }
  if (migration) overrides.migration = *migration == "on";

  if (*run_cmd) return cmd_run(scenario, overrides, out_dir, json_out, out, err);
  if (*sweep_cmd) return cmd_sweep(scenario, levels, overrides, out_dir, json_out, out, err);
  if (*demo_cmd) return cmd_demo(worked_example_expectation(), json_out, out, err);
  return cmd_validate(scenario, out, err);
}

int main(int argc, char** argv) { return main(argc, argv, std::cout, std::cerr); }

}  // namespace cloudq::cli
