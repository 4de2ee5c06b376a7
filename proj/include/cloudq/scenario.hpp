#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudq/model.hpp"
#include "cloudq/time.hpp"

namespace cloudq {

enum class SchedulerKind { RoundRobin, ShortestJobFirst };
enum class BandwidthUnit { PerMs, PerS };

struct DatacenterSpec {
  std::string id;
  std::uint32_t vm_count = 1;
  /// Instructions per ms, shared by every VM unless `vm_rates` is given.
  double rate = 100;
  /// Optional per-VM rates; either empty or one entry per VM.
  std::vector<double> vm_rates;
  double memory = 0;
  double bandwidth = 1;
  BandwidthUnit bandwidth_unit = BandwidthUnit::PerMs;

  /// Bandwidth in data units per ms.
  double bandwidth_per_ms() const noexcept {
    return bandwidth_unit == BandwidthUnit::PerS ? bandwidth / 1000.0 : bandwidth;
  }

  friend bool operator==(const DatacenterSpec&, const DatacenterSpec&) = default;
};

struct AdvancedConfig {
  std::uint32_t user_grouping = 1000;
  std::uint32_t request_grouping = 100;
  double instruction_length = 250;

  friend bool operator==(const AdvancedConfig&, const AdvancedConfig&) = default;
};

struct HopEntry {
  std::string datacenter;
  VmIndex from = 0;
  VmIndex to = 0;
  Duration hop = 0;

  friend bool operator==(const HopEntry&, const HopEntry&) = default;
};

struct PolicyConfig {
  SchedulerKind scheduler = SchedulerKind::RoundRobin;
  bool migration = false;
  AdmissionPolicy admission;
  Duration hop_time = 0;
  std::vector<HopEntry> hops;
  Duration migration_interval = 10;
  std::uint32_t migration_cap = 3;
  std::uint64_t event_cap = 10'000'000;
  std::optional<Duration> starvation_threshold;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

/// A job listed verbatim in the scenario instead of generated from traffic.
struct ExplicitJob {
  JobId id = 0;
  SimTime arrival = 0;
  Duration burst = 0;
  /// Empty means the scenario's only datacenter.
  std::string datacenter;
  double data_size = 0;

  friend bool operator==(const ExplicitJob&, const ExplicitJob&) = default;
};

/// A scenario exactly as written: every duration is in `time_unit`. Use
/// normalized() for the millisecond form the simulator runs on.
struct ScenarioConfig {
  std::string name;
  TimeUnit time_unit = TimeUnit::Ms;
  SimTime horizon = 0;
  std::uint64_t seed = 1;
  std::vector<UserBase> user_bases;
  std::vector<DatacenterSpec> datacenters;
  AdvancedConfig advanced;
  PolicyConfig policy;
  std::vector<ExplicitJob> jobs;

  const DatacenterSpec* find_datacenter(std::string_view id) const noexcept;
  /// Index of the datacenter an explicit job runs in.
  std::size_t datacenter_index(const ExplicitJob& job) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates scenario text. Throws ParseError, UnknownKey or
/// ValidationError.
ScenarioConfig load_scenario(std::string_view source);

/// Reads a file and loads it. A missing file is a ParseError.
ScenarioConfig load_scenario_file(const std::string& path);

/// Throws ValidationError describing the first problem found.
void validate(const ScenarioConfig& config);

/// Text that load_scenario maps back to an equal config.
std::string serialize_scenario(const ScenarioConfig& config);

/// Copy with every duration converted to milliseconds and time_unit = Ms.
ScenarioConfig normalized(const ScenarioConfig& config);

std::string_view to_string(SchedulerKind kind) noexcept;
std::string_view to_string(AdmissionMode mode) noexcept;
std::string_view to_string(BandwidthUnit unit) noexcept;

/// Golden scenarios compiled into the library, looked up by file name
/// (e.g. "table6_demo.scn").
std::optional<std::string_view> embedded_scenario(std::string_view name);
std::vector<std::string_view> embedded_scenario_names();

}  // namespace cloudq
