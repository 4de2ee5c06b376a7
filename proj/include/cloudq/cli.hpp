#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cloudq/scenario.hpp"

namespace cloudq::cli {

enum ExitCode : int {
  kOk = 0,
  kScenarioError = 2,
  kRuntimeError = 3,
  kDemoMismatch = 4,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<SchedulerKind> scheduler;
  std::optional<bool> migration;
  /// In the scenario's own time unit.
  std::optional<double> deadline;
};

/// Applies overrides and revalidates. A deadline override also switches
/// admission to deadline mode.
ScenarioConfig apply_overrides(ScenarioConfig config, const Overrides& overrides);

/// Loads `name` from disk, falling back to the embedded golden scenarios
/// when no such file exists.
ScenarioConfig resolve_scenario(const std::string& name);

/// Parses "5,10,15": non-empty, positive, strictly increasing. Throws
/// ValidationError.
std::vector<std::uint64_t> parse_levels(const std::string& text);

struct DemoExpectation {
  std::vector<std::uint32_t> order;
  std::map<std::uint32_t, double> waits;
};

/// Service order and waits (hours) of the worked shortest-job-first example.
DemoExpectation worked_example_expectation();

int cmd_run(const std::string& scenario, const Overrides& overrides,
            const std::filesystem::path& out_dir, bool json, std::ostream& out,
            std::ostream& err);
int cmd_sweep(const std::string& scenario, const std::string& levels,
              const Overrides& overrides, const std::filesystem::path& out_dir, bool json,
              std::ostream& out, std::ostream& err);
int cmd_demo(const DemoExpectation& expected, bool json, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& scenario, std::ostream& out, std::ostream& err);

/// Full command line: parses argv and dispatches to a subcommand.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace cloudq::cli
