#include "cloudq/policies.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "cloudq/error.hpp"

namespace cloudq {

VmIndex rr_next_vm(RrState& state, const Datacenter& dc) {
  if (dc.vms.empty()) throw EmptyDatacenter("datacenter " + dc.id + " has no VMs");
  state.pointer %= dc.vms.size();
  const VmIndex vm = dc.vms[state.pointer].id;
  state.pointer = (state.pointer + 1) % dc.vms.size();
  return vm;
}

JobId sjf_select(const ReadyQueue& rq, SimTime now) {
  if (rq.empty()) throw EmptyQueue("ready queue is empty");
  const ReadyEntry& best = *rq.begin();
  if (best.arrival > now) {
    throw Error("job " + std::to_string(best.id) + " selected before its arrival");
  }
  return best.id;
}

Schedule sjf_schedule(std::span<const ReadyEntry> jobs) {
  std::set<JobId> seen;
  for (const auto& j : jobs) {
    if (!seen.insert(j.id).second) {
      throw DuplicateJobId("job id " + std::to_string(j.id) + " appears twice");
    }
  }

  std::vector<ReadyEntry> pending(jobs.begin(), jobs.end());
  std::stable_sort(pending.begin(), pending.end(),
                   [](const ReadyEntry& a, const ReadyEntry& b) { return a.arrival < b.arrival; });

  Schedule out;
  ReadyQueue ready;
  SimTime clock = 0;
  std::size_t next = 0;
  while (next < pending.size() || !ready.empty()) {
    if (ready.empty() && pending[next].arrival > clock) {
      out.idle += pending[next].arrival - clock;
      clock = pending[next].arrival;
    }
    while (next < pending.size() && pending[next].arrival <= clock) {
      ready.insert(pending[next++]);
    }
    const ReadyEntry job = *ready.begin();
    ready.erase(job);
    out.order.push_back(job.id);
    out.start[job.id] = clock;
    out.wait[job.id] = clock - job.arrival;
    clock += job.burst;
  }
  out.makespan = clock;
  return out;
}

HopTable::HopTable(std::size_t vm_count, Duration uniform)
    : n_(vm_count), hops_(vm_count * vm_count, uniform) {
  if (uniform < 0) throw Error("hop time must be non-negative");
  for (std::size_t i = 0; i < n_; ++i) hops_[i * n_ + i] = 0;
}

Duration HopTable::at(VmIndex from, VmIndex to) const {
  if (from >= n_ || to >= n_) {
    throw UnknownVm("no hop entry for VM pair (" + std::to_string(from) + ", " +
                    std::to_string(to) + ")");
  }
  return hops_[static_cast<std::size_t>(from) * n_ + to];
}

void HopTable::set(VmIndex from, VmIndex to, Duration hop) {
  (void)at(from, to);
  if (hop < 0) throw Error("hop time must be non-negative");
  if (from == to && hop != 0) throw Error("hop time from a VM to itself must be 0");
  hops_[static_cast<std::size_t>(from) * n_ + to] = hop;
}

MigrationDecision migration_decision(Duration wait_on_current, VmIndex current_vm,
                                     std::span<const VmWait> candidates,
                                     const HopTable& hops) {
  MigrationDecision decision{std::nullopt, wait_on_current, wait_on_current};
  (void)hops.at(current_vm, current_vm);
  for (const VmWait& c : candidates) {
    if (c.vm == current_vm) continue;
    const Duration total = c.wait + hops.at(current_vm, c.vm);
    if (total >= wait_on_current) continue;
    const bool better = !decision.target || total < decision.move_wait ||
                        (total == decision.move_wait && c.vm < *decision.target);
    if (better) {
      decision.target = c.vm;
      decision.move_wait = total;
    }
  }
  return decision;
}

std::vector<VmIndex> underutilized_vms(std::span<const std::size_t> loads) {
  const std::size_t total = std::accumulate(loads.begin(), loads.end(), std::size_t{0});
  std::vector<VmIndex> out;
  // load < total / n, kept in integers.
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (loads[i] * loads.size() < total) out.push_back(static_cast<VmIndex>(i));
  }
  return out;
}

Duration expected_wait(const VmInstance& vm, std::span<const Job> jobs, SimTime now,
                       std::optional<JobId> stop_before) {
  Duration wait = 0;
  if (vm.running) wait += std::max<Duration>(0, vm.busy_until - now);
  for (JobId id : vm.queue) {
    if (stop_before && id == *stop_before) break;
    wait += service_time(jobs[id - 1], vm);
  }
  return wait;
}

}  // namespace cloudq
