#include "cloudq/metrics.hpp"

#include <algorithm>
#include <string>

#include "cloudq/error.hpp"

namespace cloudq {

StatSummary summarize(std::span<const double> samples) {
  if (samples.empty()) throw EmptyInput("cannot summarize an empty sample");
  long double sum = 0;
  StatSummary s{0, samples.front(), samples.front(), samples.size()};
  for (double x : samples) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  // Rounding can push the mean a hair outside [min, max] for equal samples.
  s.avg = std::clamp(static_cast<double>(sum / samples.size()), s.min, s.max);
  return s;
}

namespace {

void require_started(const JobTrace& t) {
  if (!t.start || !t.finish) {
    throw NeverStarted("job " + std::to_string(t.id) + " never started");
  }
}

}  // namespace

Duration queue_wait(const JobTrace& trace) {
  if (!trace.start) throw NeverStarted("job " + std::to_string(trace.id) + " never started");
  return *trace.start - trace.arrival;
}

Duration network_response_time(const JobTrace& trace) {
  require_started(trace);
  return *trace.finish - trace.arrival + trace.transfer;
}

Duration processing_time_per_request(const JobTrace& trace) {
  require_started(trace);
  return (*trace.finish - *trace.start) / std::max<std::uint32_t>(1, trace.requests);
}

int rejection_percentage(std::uint64_t submitted, std::uint64_t rejected) {
  if (submitted == 0) throw NoSubmissions("no jobs were submitted");
  if (rejected > submitted) throw Error("more rejections than submissions");
  return static_cast<int>((200 * rejected + submitted) / (2 * submitted));
}

std::vector<StarvationEntry> starvation_report(std::span<const JobTrace> traces,
                                               Duration threshold) {
  if (!(threshold > 0)) throw Error("starvation threshold must be positive");
  std::vector<StarvationEntry> out;
  for (const JobTrace& t : traces) {
    if (t.start) {
      const Duration wait = queue_wait(t);
      if (wait >= threshold) out.push_back({t.id, wait});
    } else if (t.reject_reason == RejectReason::DeadlineExpired && t.rejected_at) {
      out.push_back({t.id, *t.rejected_at - t.arrival});
    }
  }
  std::sort(out.begin(), out.end(), [](const StarvationEntry& a, const StarvationEntry& b) {
    if (a.wait != b.wait) return a.wait > b.wait;
    return a.id < b.id;
  });
  return out;
}

std::vector<NamedSummary> summary_rows(const RunMetrics& metrics) {
  std::vector<double> response, processing, wait;
  for (const JobTrace& t : metrics.jobs) {
    if (t.state != JobState::Completed) continue;
    response.push_back(network_response_time(t));
    processing.push_back(processing_time_per_request(t));
    wait.push_back(queue_wait(t));
  }
  if (response.empty()) return {};
  return {
      {"response_time", summarize(response)},
      {"processing_time", summarize(processing)},
      {"queue_wait", summarize(wait)},
  };
}

}  // namespace cloudq
