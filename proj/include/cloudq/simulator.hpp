#pragma once

#include <cstdint>
#include <optional>

#include "cloudq/metrics.hpp"
#include "cloudq/scenario.hpp"

namespace cloudq {

struct RunOptions {
  /// Generate exactly this many traffic jobs, split across user bases in
  /// proportion to their configured volume. Used by load sweeps; a scenario
  /// with explicit jobs cannot be scaled this way (ValidationError).
  std::optional<std::uint64_t> job_budget;
  /// Keep every popped event in RunMetrics::event_log.
  bool record_events = false;
};

/// Runs one scenario to completion. Arrivals fall inside the horizon; the
/// run then drains, so every job ends Completed or Rejected. Equal inputs
/// give identical metrics. Throws ValidationError for an invalid scenario
/// and HorizonExceeded when the event cap is hit.
RunMetrics run(const ScenarioConfig& scenario, const RunOptions& options = {});

/// Jobs per user base for a given total budget (largest remainder, ties to
/// the earlier user base).
std::vector<std::uint64_t> split_job_budget(const ScenarioConfig& scenario,
                                            std::uint64_t budget);

}  // namespace cloudq
