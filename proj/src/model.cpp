#include "cloudq/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cloudq/error.hpp"

namespace cloudq {

std::string_view to_string(JobState state) noexcept {
  switch (state) {
    case JobState::Queued: return "Queued";
    case JobState::Running: return "Running";
    case JobState::Completed: return "Completed";
    case JobState::Rejected: return "Rejected";
  }
  return "?";
}

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::None: return "";
    case RejectReason::QueueFull: return "QueueFull";
    case RejectReason::DeadlineExpired: return "DeadlineExpired";
  }
  return "?";
}

Duration processing_time(double instruction_length, double rate) {
  if (!(rate > 0)) throw ZeroRate("VM rate must be positive");
  return instruction_length / rate;
}

Duration transfer_time(double data_size, double bandwidth) {
  if (!(bandwidth > 0)) throw ZeroBandwidth("bandwidth must be positive");
  return data_size / bandwidth;
}

std::uint64_t request_count(const UserBase& ub, SimTime horizon) {
  if (!(horizon > 0)) return 0;
  const long double exact = static_cast<long double>(ub.user_grouping) *
                            ub.requests_per_user_per_hour * horizon /
                            static_cast<long double>(kMsPerHour);
  // Absorb representation noise so 12000.0000001 does not become 12001.
  const long double slack = 1e-9L * std::max<long double>(1, exact);
  return static_cast<std::uint64_t>(std::max<long double>(0, std::ceil(exact - slack)));
}

std::uint64_t batch_count(const UserBase& ub, SimTime horizon) {
  const std::uint64_t group = std::max<std::uint32_t>(1, ub.request_grouping);
  return (request_count(ub, horizon) + group - 1) / group;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<Job> batch_requests(const UserBase& ub, SimTime horizon,
                                std::uint64_t requests, std::uint64_t seed,
                                double instruction_length_per_request) {
  std::vector<Job> jobs;
  if (!(horizon > 0) || requests == 0) return jobs;

  // The 53-bit mantissa conversion is spelled out so traces do not depend on
  // the standard library's distribution implementation.
  std::mt19937_64 gen(seed);
  std::vector<SimTime> times(requests);
  for (auto& t : times) {
    t = static_cast<double>(gen() >> 11) * 0x1p-53 * horizon;
  }
  std::sort(times.begin(), times.end());

  const std::uint64_t group = std::max<std::uint32_t>(1, ub.request_grouping);
  jobs.reserve((requests + group - 1) / group);
  for (std::uint64_t first = 0; first < requests; first += group) {
    const auto size = static_cast<std::uint32_t>(std::min(group, requests - first));
    Job job;
    job.id = static_cast<JobId>(jobs.size() + 1);
    job.arrival = times[first];
    job.ready_at = job.arrival;
    job.instruction_length = instruction_length_per_request * size;
    job.data_size = ub.data_size_per_request * size;
    job.requests = size;
    job.origin_ub = ub.id;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

}  // namespace

std::vector<Job> generate_arrivals(const UserBase& ub, SimTime horizon,
                                   std::uint64_t seed,
                                   double instruction_length_per_request) {
  return batch_requests(ub, horizon, request_count(ub, horizon), seed,
                        instruction_length_per_request);
}

std::vector<Job> generate_batches(const UserBase& ub, SimTime horizon,
                                  std::uint64_t batches, std::uint64_t seed,
                                  double instruction_length_per_request) {
  std::vector<Job> jobs;
  if (!(horizon > 0) || batches == 0) return jobs;
  // One draw per batch, so the first k draws are shared by every budget >= k
  // and a larger budget only adds jobs to a smaller one.
  std::mt19937_64 gen(seed);
  std::vector<SimTime> times(batches);
  for (auto& t : times) t = static_cast<double>(gen() >> 11) * 0x1p-53 * horizon;
  std::sort(times.begin(), times.end());

  const std::uint32_t size = std::max<std::uint32_t>(1, ub.request_grouping);
  jobs.reserve(batches);
  for (SimTime t : times) {
    Job job;
    job.id = static_cast<JobId>(jobs.size() + 1);
    job.arrival = t;
    job.ready_at = t;
    job.instruction_length = instruction_length_per_request * size;
    job.data_size = ub.data_size_per_request * size;
    job.requests = size;
    job.origin_ub = ub.id;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

Admission admit(const Job& job, const Datacenter& dc, SimTime now) {
  if (job.state != JobState::Queued) {
    throw Error("admit: job " + std::to_string(job.id) + " is not queued");
  }
  const AdmissionPolicy& policy = dc.admission;
  if (policy.mode == AdmissionMode::Deadline) {
    return Admission{true, RejectReason::None, now + policy.deadline};
  }
  bool full = true;
  if (dc.central_queue) {
    full = dc.ready.size() >= static_cast<std::size_t>(policy.capacity) * dc.vms.size();
  } else {
    full = std::all_of(dc.vms.begin(), dc.vms.end(), [&](const VmInstance& vm) {
      return vm.queue.size() >= policy.capacity;
    });
  }
  if (full) return Admission{false, RejectReason::QueueFull, std::nullopt};
  return Admission{};
}

Duration service_time(const Job& job, const VmInstance& vm) {
  if (job.burst) return *job.burst;
  return processing_time(job.instruction_length, vm.rate);
}

}  // namespace cloudq
