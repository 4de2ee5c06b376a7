#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cloudq/model.hpp"
#include "cloudq/ready_queue.hpp"

namespace cloudq {

/// Round-robin wheel: returns the VM under the pointer and advances it by
/// one. Load is ignored. Throws EmptyDatacenter for a VM-less datacenter.
VmIndex rr_next_vm(RrState& state, const Datacenter& dc);

/// Shortest burst in the queue (ties: earlier arrival, then smaller id).
/// Throws EmptyQueue. Entries that have not arrived by `now` are a caller
/// bug and raise Error.
JobId sjf_select(const ReadyQueue& rq, SimTime now);

struct Schedule {
  std::vector<JobId> order;
  std::map<JobId, SimTime> start;
  std::map<JobId, Duration> wait;
  SimTime makespan = 0;
  Duration idle = 0;
};

/// Non-preemptive single-server shortest-job-first schedule. The server only
/// idles when nothing has arrived. Input order does not matter. Throws
/// DuplicateJobId.
Schedule sjf_schedule(std::span<const ReadyEntry> jobs);

/// Per-VM-pair migration cost. The diagonal is always zero.
class HopTable {
 public:
  HopTable() = default;
  HopTable(std::size_t vm_count, Duration uniform);

  std::size_t size() const noexcept { return n_; }
  /// Throws UnknownVm for an index out of range.
  Duration at(VmIndex from, VmIndex to) const;
  /// Throws UnknownVm; setting a non-zero diagonal or negative value is an
  /// Error.
  void set(VmIndex from, VmIndex to, Duration hop);

 private:
  std::size_t n_ = 0;
  std::vector<Duration> hops_;
};

struct VmWait {
  VmIndex vm = 0;
  Duration wait = 0;
};

struct MigrationDecision {
  /// Empty means stay.
  std::optional<VmIndex> target;
  Duration stay_wait = 0;
  /// Expected wait on the target including the hop; equals stay_wait when
  /// staying.
  Duration move_wait = 0;

  bool migrate() const noexcept { return target.has_value(); }
};

/// Move only when some candidate's wait plus hop is strictly below the wait
/// on the current VM; the smallest such total wins, ties to the smaller VM
/// index. Throws UnknownVm if a VM is outside the hop table.
MigrationDecision migration_decision(Duration wait_on_current, VmIndex current_vm,
                                     std::span<const VmWait> candidates,
                                     const HopTable& hops);

/// VMs whose load is strictly below the mean load.
std::vector<VmIndex> underutilized_vms(std::span<const std::size_t> loads);

/// Remaining work ahead of a newcomer on `vm`: residual of the running job
/// plus the service of every waiting job. `stop_before` limits the sum to
/// jobs queued ahead of that job.
Duration expected_wait(const VmInstance& vm, std::span<const Job> jobs, SimTime now,
                       std::optional<JobId> stop_before = std::nullopt);

}  // namespace cloudq
