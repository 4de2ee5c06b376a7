#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "cloudq/ready_queue.hpp"
#include "cloudq/time.hpp"

namespace cloudq {

using VmIndex = std::uint32_t;

enum class JobState { Queued, Running, Completed, Rejected };
enum class RejectReason { None, QueueFull, DeadlineExpired };

std::string_view to_string(JobState state) noexcept;
std::string_view to_string(RejectReason reason) noexcept;

/// A unit of work. Explicit jobs carry a burst; generated batch jobs carry an
/// instruction length whose duration depends on the VM that runs them.
struct Job {
  JobId id = 0;
  SimTime arrival = 0;
  std::optional<Duration> burst;
  double instruction_length = 0;
  double data_size = 0;
  /// Number of user requests folded into this job (1 for explicit jobs).
  std::uint32_t requests = 1;
  /// User base id; empty for explicit jobs.
  std::string origin_ub;
  std::uint32_t dc = 0;

  JobState state = JobState::Queued;
  RejectReason reject_reason = RejectReason::None;
  std::optional<SimTime> start_time;
  std::optional<SimTime> finish_time;
  std::optional<SimTime> rejected_at;
  /// Earliest time the job may start on its current VM (arrival, or the end
  /// of a migration hop).
  SimTime ready_at = 0;
  /// Every VM the job was queued on, in order.
  std::vector<VmIndex> vm_history;
  std::uint32_t migrations = 0;
};

struct VmInstance {
  VmIndex id = 0;
  double rate = 100;        // instructions per ms
  double memory = 0;        // MB, carried but not modeled
  double bandwidth = 1;     // data units per ms
  std::deque<JobId> queue;  // waiting jobs, FIFO
  std::optional<JobId> running;
  SimTime busy_until = 0;
  /// Fire time of the outstanding JobStart event for this VM, if any.
  std::optional<SimTime> pending_start;
};

enum class AdmissionMode { Deadline, QueueCap };

struct AdmissionPolicy {
  AdmissionMode mode = AdmissionMode::Deadline;
  Duration deadline = 0;
  std::uint32_t capacity = 1;

  friend bool operator==(const AdmissionPolicy&, const AdmissionPolicy&) = default;
};

struct RrState {
  std::size_t pointer = 0;
};

struct Datacenter {
  std::string id;
  std::vector<VmInstance> vms;
  RrState rr;
  AdmissionPolicy admission;
  /// Shared shortest-job-first queue; used instead of per-VM queues when
  /// `central_queue` is set.
  bool central_queue = false;
  ReadyQueue ready;
};

struct UserBase {
  std::string id;
  double requests_per_user_per_hour = 0;
  double data_size_per_request = 0;
  std::string target_dc;
  std::uint32_t user_grouping = 1;
  std::uint32_t request_grouping = 1;

  friend bool operator==(const UserBase&, const UserBase&) = default;
};

/// Throws ZeroRate unless rate > 0.
Duration processing_time(double instruction_length, double rate);

/// Throws ZeroBandwidth unless bandwidth > 0.
Duration transfer_time(double data_size, double bandwidth);

/// Number of requests a user base emits over `horizon`:
/// ceil(users * requests/user/hour * hours).
std::uint64_t request_count(const UserBase& ub, SimTime horizon);

/// ceil(request_count / request_grouping).
std::uint64_t batch_count(const UserBase& ub, SimTime horizon);

/// Batched traffic from one user base over [0, horizon). Each request gets a
/// uniform arrival time from a generator seeded with `seed`; sorted requests
/// are grouped into batches of `request_grouping` and each batch becomes one
/// job arriving with its earliest member. Job ids are 1..n in arrival order
/// and `dc` is left 0 for the caller to resolve.
std::vector<Job> generate_arrivals(const UserBase& ub, SimTime horizon,
                                   std::uint64_t seed,
                                   double instruction_length_per_request);

/// Same as generate_arrivals but emits exactly `batches` full batches,
/// scaling the request volume instead of deriving it from the rate.
std::vector<Job> generate_batches(const UserBase& ub, SimTime horizon,
                                  std::uint64_t batches, std::uint64_t seed,
                                  double instruction_length_per_request);

/// Stream splitting for per-user-base generators (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

struct Admission {
  bool admitted = true;
  RejectReason reason = RejectReason::None;
  /// Deadline mode: when the job is rejected if it has not started.
  std::optional<SimTime> expires_at;
};

/// QueueCap rejects iff every queue in `dc` is at capacity (the shared queue
/// counts capacity per VM). Deadline always admits and reports the expiry.
Admission admit(const Job& job, const Datacenter& dc, SimTime now);

/// Service duration of `job` on `vm`.
Duration service_time(const Job& job, const VmInstance& vm);

}  // namespace cloudq
