#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloudq/event_calendar.hpp"
#include "cloudq/model.hpp"
#include "cloudq/time.hpp"

namespace cloudq {

/// What happened to one job over a run. `vm_history` is empty unless the job
/// started; otherwise its length minus one is the migration count.
struct JobTrace {
  JobId id = 0;
  std::string origin_ub;
  std::string datacenter;
  SimTime arrival = 0;
  std::optional<SimTime> start;
  std::optional<SimTime> finish;
  std::optional<SimTime> rejected_at;
  std::vector<VmIndex> vm_history;
  JobState state = JobState::Queued;
  RejectReason reject_reason = RejectReason::None;
  std::uint32_t requests = 1;
  Duration transfer = 0;
};

struct StatSummary {
  double avg = 0;
  double min = 0;
  double max = 0;
  std::size_t count = 0;
};

struct MigrationRecord {
  JobId job = 0;
  std::string datacenter;
  VmIndex from = 0;
  VmIndex to = 0;
  SimTime at = 0;
  /// Predicted wait had the job stayed, and predicted wait plus hop on the
  /// target, both at decision time.
  Duration stay_wait = 0;
  Duration move_wait = 0;
};

struct RunMetrics {
  std::string scenario;
  /// Unit the scenario was written in; reports are rendered in it.
  TimeUnit time_unit = TimeUnit::Ms;
  SimTime horizon = 0;
  std::uint64_t submitted = 0;
  std::uint64_t completed = 0;
  std::uint64_t rejected = 0;
  /// Sorted by id.
  std::vector<JobTrace> jobs;
  std::vector<MigrationRecord> migrations;
  std::uint64_t events_processed = 0;
  /// Full popped-event sequence; filled only when requested.
  std::vector<Event> event_log;
  /// Threshold for the starvation report, if the scenario defines one.
  std::optional<Duration> starvation_threshold;
};

/// Throws EmptyInput.
StatSummary summarize(std::span<const double> samples);

/// start - arrival. Throws NeverStarted.
Duration queue_wait(const JobTrace& trace);

/// finish - arrival plus the transfer delay. Throws NeverStarted.
Duration network_response_time(const JobTrace& trace);

/// Datacenter processing time per request: (finish - start) / requests.
/// Throws NeverStarted.
Duration processing_time_per_request(const JobTrace& trace);

/// round_half_up(100 * rejected / submitted). Throws NoSubmissions when
/// submitted is 0, and Error when rejected > submitted.
int rejection_percentage(std::uint64_t submitted, std::uint64_t rejected);

struct StarvationEntry {
  JobId id = 0;
  Duration wait = 0;

  friend bool operator==(const StarvationEntry&, const StarvationEntry&) = default;
};

/// Jobs that waited at least `threshold` before starting, plus every job
/// rejected by deadline expiry (its wait is the time until rejection).
/// Longest wait first, ties by id. Throws Error unless threshold > 0.
std::vector<StarvationEntry> starvation_report(std::span<const JobTrace> traces,
                                               Duration threshold);

struct NamedSummary {
  std::string metric;
  StatSummary stats;
};

/// The Table-IV-shaped rows: response_time, processing_time, queue_wait over
/// completed jobs. Empty when nothing completed.
std::vector<NamedSummary> summary_rows(const RunMetrics& metrics);

}  // namespace cloudq
