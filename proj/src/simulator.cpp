#include "cloudq/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cloudq/error.hpp"
#include "cloudq/event_calendar.hpp"
#include "cloudq/policies.hpp"

namespace cloudq {

std::vector<std::uint64_t> split_job_budget(const ScenarioConfig& scenario,
                                            std::uint64_t budget) {
  const ScenarioConfig cfg = normalized(scenario);
  const std::size_t n = cfg.user_bases.size();
  std::vector<std::uint64_t> share(n, 0);
  if (n == 0) return share;

  std::vector<long double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = static_cast<long double>(batch_count(cfg.user_bases[i], cfg.horizon));
  }
  long double total = std::accumulate(weight.begin(), weight.end(), 0.0L);
  if (total == 0) {
    std::fill(weight.begin(), weight.end(), 1.0L);
    total = static_cast<long double>(n);
  }

  std::vector<long double> remainder(n);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double exact = budget * weight[i] / total;
    share[i] = static_cast<std::uint64_t>(exact);
    remainder[i] = exact - share[i];
    assigned += share[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < budget; k = (k + 1) % n, ++assigned) ++share[order[k]];
  return share;
}

namespace {

// Queues and events refer to jobs by handle = slot + 1; slots are ordered so
// that handle order matches external id order.
using Handle = std::uint32_t;

struct DcState {
  Datacenter dc;
  HopTable hops;
  double nominal_rate = 100;
  double bandwidth_per_ms = 1;
  bool dispatch_pending = false;
  std::optional<SimTime> tick_at;
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& scenario, const RunOptions& options)
      : source_(scenario), cfg_(normalized(scenario)), options_(options) {
    build_datacenters();
    build_jobs();
  }

  RunMetrics run() {
    for (std::size_t slot = 0; slot < jobs_.size(); ++slot) {
      calendar_.schedule(jobs_[slot].arrival, EventKind::JobArrival,
                         {static_cast<std::uint32_t>(slot + 1), kNoId, jobs_[slot].dc});
    }
    while (!calendar_.empty()) {
      if (calendar_.popped() >= cfg_.policy.event_cap) {
        throw HorizonExceeded("run exceeded the cap of " + std::to_string(cfg_.policy.event_cap) +
                              " events");
      }
      const Event ev = calendar_.pop();
      if (options_.record_events) metrics_.event_log.push_back(ev);
      switch (ev.kind) {
        case EventKind::JobArrival: on_arrival(ev.payload.job); break;
        case EventKind::JobStart: on_start(ev.payload.dc, ev.payload.vm); break;
        case EventKind::JobFinish: on_finish(ev.payload.job); break;
        case EventKind::MigrationCheck: on_migration_check(ev.payload.dc); break;
        case EventKind::DeadlineExpiry: on_deadline(ev.payload.job); break;
      }
    }
    return collect();
  }

 private:
  SimTime now() const { return calendar_.now(); }
  Job& job(Handle h) { return jobs_[h - 1]; }
  bool migration_enabled() const { return cfg_.policy.migration; }

  void build_datacenters() {
    const bool central = cfg_.policy.scheduler == SchedulerKind::ShortestJobFirst;
    for (const DatacenterSpec& spec : cfg_.datacenters) {
      DcState s;
      s.dc.id = spec.id;
      s.dc.admission = cfg_.policy.admission;
      s.dc.central_queue = central;
      for (std::uint32_t v = 0; v < spec.vm_count; ++v) {
        VmInstance vm;
        vm.id = v;
        vm.rate = spec.vm_rates.empty() ? spec.rate : spec.vm_rates[v];
        vm.memory = spec.memory;
        vm.bandwidth = spec.bandwidth_per_ms();
        s.dc.vms.push_back(std::move(vm));
      }
      s.hops = HopTable(spec.vm_count, cfg_.policy.hop_time);
      s.nominal_rate = spec.rate;
      s.bandwidth_per_ms = spec.bandwidth_per_ms();
      dcs_.push_back(std::move(s));
    }
    for (const HopEntry& h : cfg_.policy.hops) {
      dcs_[dc_index(h.datacenter)].hops.set(h.from, h.to, h.hop);
    }
  }

  std::uint32_t dc_index(const std::string& id) const {
    for (std::size_t i = 0; i < cfg_.datacenters.size(); ++i) {
      if (cfg_.datacenters[i].id == id) return static_cast<std::uint32_t>(i);
    }
    throw ValidationError("unknown datacenter '" + id + "'");
  }

  void build_jobs() {
    std::vector<ExplicitJob> listed = cfg_.jobs;
    std::sort(listed.begin(), listed.end(),
              [](const ExplicitJob& a, const ExplicitJob& b) { return a.id < b.id; });
    JobId max_id = 0;
    for (const ExplicitJob& e : listed) {
      Job j;
      j.id = e.id;
      j.arrival = e.arrival;
      j.ready_at = e.arrival;
      j.burst = e.burst;
      j.data_size = e.data_size;
      j.dc = static_cast<std::uint32_t>(cfg_.datacenter_index(e));
      max_id = std::max(max_id, e.id);
      jobs_.push_back(std::move(j));
    }

    std::vector<std::uint64_t> budget;
    if (options_.job_budget) {
      if (!cfg_.jobs.empty() || cfg_.user_bases.empty()) {
        throw ValidationError("scaling by job count needs a scenario driven only by user bases");
      }
      budget = split_job_budget(source_, *options_.job_budget);
    }

    struct Generated {
      Job job;
      std::size_t ub;
    };
    std::vector<Generated> generated;
    for (std::size_t i = 0; i < cfg_.user_bases.size(); ++i) {
      const UserBase& ub = cfg_.user_bases[i];
      const std::uint64_t seed = derive_seed(cfg_.seed, i);
      std::vector<Job> batch =
          options_.job_budget
              ? generate_batches(ub, cfg_.horizon, budget[i], seed, cfg_.advanced.instruction_length)
              : generate_arrivals(ub, cfg_.horizon, seed, cfg_.advanced.instruction_length);
      const std::uint32_t dc = dc_index(ub.target_dc);
      for (Job& j : batch) {
        j.dc = dc;
        generated.push_back({std::move(j), i});
      }
    }
    std::stable_sort(generated.begin(), generated.end(), [](const Generated& a, const Generated& b) {
      if (a.job.arrival != b.job.arrival) return a.job.arrival < b.job.arrival;
      return a.ub < b.ub;
    });
    for (Generated& g : generated) {
      g.job.id = ++max_id;
      jobs_.push_back(std::move(g.job));
    }
    // Arrival events are inserted in this order, so simultaneous arrivals are
    // handled by ascending id.
    std::stable_sort(jobs_.begin(), jobs_.end(), [](const Job& a, const Job& b) { return a.id < b.id; });
  }

  // -------------------------------------------------------------------------

  void on_arrival(Handle h) {
    Job& j = job(h);
    DcState& s = dcs_[j.dc];
    const Admission adm = admit(j, s.dc, now());
    if (!adm.admitted) {
      reject(h, adm.reason);
      return;
    }
    if (adm.expires_at) {
      calendar_.schedule(*adm.expires_at, EventKind::DeadlineExpiry, {h, kNoId, j.dc});
    }

    if (s.dc.central_queue) {
      s.dc.ready.insert({h, j.arrival, sjf_key(j, s)});
      request_dispatch(j.dc);
      return;
    }

    VmIndex vm = rr_next_vm(s.dc.rr, s.dc);
    if (s.dc.admission.mode == AdmissionMode::QueueCap) {
      // Admission guarantees some VM has room; keep turning the wheel.
      while (s.dc.vms[vm].queue.size() >= s.dc.admission.capacity) vm = rr_next_vm(s.dc.rr, s.dc);
    }
    s.dc.vms[vm].queue.push_back(h);
    j.vm_history.push_back(vm);
    request_start(j.dc, vm, now());
    if (migration_enabled()) arm_tick(j.dc);
  }

  Duration sjf_key(const Job& j, const DcState& s) const {
    return j.burst ? *j.burst : processing_time(j.instruction_length, s.nominal_rate);
  }

  void request_dispatch(std::uint32_t dc) {
    if (dcs_[dc].dispatch_pending) return;
    dcs_[dc].dispatch_pending = true;
    calendar_.schedule(now(), EventKind::JobStart, {kNoId, kNoId, dc});
  }

  void request_start(std::uint32_t dc, VmIndex vm, SimTime at) {
    VmInstance& v = dcs_[dc].dc.vms[vm];
    if (v.pending_start && *v.pending_start <= at) return;
    v.pending_start = at;
    calendar_.schedule(at, EventKind::JobStart, {kNoId, vm, dc});
  }

  bool expired(const Job& j) const {
    return cfg_.policy.admission.mode == AdmissionMode::Deadline &&
           now() - j.arrival >= cfg_.policy.admission.deadline;
  }

  void on_start(std::uint32_t dc, VmIndex vm) {
    DcState& s = dcs_[dc];
    if (vm == kNoId) {
      s.dispatch_pending = false;
      for (VmInstance& v : s.dc.vms) {
        while (!v.running && !s.dc.ready.empty()) {
          const Handle h = sjf_select(s.dc.ready, now());
          s.dc.ready.erase({h, job(h).arrival, sjf_key(job(h), s)});
          if (expired(job(h))) {
            reject(h, RejectReason::DeadlineExpired);
            continue;
          }
          job(h).vm_history.push_back(v.id);
          start(h, dc, v);
        }
      }
      return;
    }

    VmInstance& v = s.dc.vms[vm];
    if (v.pending_start && *v.pending_start <= now()) v.pending_start.reset();
    if (v.running) return;
    while (!v.queue.empty()) {
      const Handle h = v.queue.front();
      Job& j = job(h);
      if (expired(j)) {
        v.queue.pop_front();
        reject(h, RejectReason::DeadlineExpired);
        continue;
      }
      if (j.ready_at > now()) {
        request_start(dc, vm, j.ready_at);
        return;
      }
      v.queue.pop_front();
      start(h, dc, v);
      return;
    }
  }

  void start(Handle h, std::uint32_t dc, VmInstance& vm) {
    Job& j = job(h);
    j.state = JobState::Running;
    j.start_time = now();
    vm.running = h;
    vm.busy_until = now() + service_time(j, vm);
    calendar_.schedule(vm.busy_until, EventKind::JobFinish, {h, vm.id, dc});
  }

  void on_finish(Handle h) {
    Job& j = job(h);
    DcState& s = dcs_[j.dc];
    VmInstance& vm = s.dc.vms[j.vm_history.back()];
    j.state = JobState::Completed;
    j.finish_time = now();
    vm.running.reset();
    if (s.dc.central_queue) {
      request_dispatch(j.dc);
    } else {
      request_start(j.dc, vm.id, now());
    }
    if (migration_enabled()) calendar_.schedule(now(), EventKind::MigrationCheck, {kNoId, kNoId, j.dc});
  }

  void on_deadline(Handle h) {
    Job& j = job(h);
    if (j.state != JobState::Queued) return;
    DcState& s = dcs_[j.dc];
    if (s.dc.central_queue) {
      s.dc.ready.erase({h, j.arrival, sjf_key(j, s)});
      reject(h, RejectReason::DeadlineExpired);
      return;
    }
    const VmIndex vm = j.vm_history.back();
    auto& queue = s.dc.vms[vm].queue;
    queue.erase(std::find(queue.begin(), queue.end(), h));
    reject(h, RejectReason::DeadlineExpired);
    request_start(j.dc, vm, now());
  }

  void reject(Handle h, RejectReason reason) {
    Job& j = job(h);
    j.state = JobState::Rejected;
    j.reject_reason = reason;
    j.rejected_at = now();
  }

  // -------------------------------------------------------------------------
  // Migration

  void arm_tick(std::uint32_t dc) {
    DcState& s = dcs_[dc];
    if (s.tick_at) return;
    s.tick_at = now() + cfg_.policy.migration_interval;
    calendar_.schedule(*s.tick_at, EventKind::MigrationCheck, {kNoId, kNoId, dc});
  }

  void on_migration_check(std::uint32_t dc) {
    DcState& s = dcs_[dc];
    const bool is_tick = s.tick_at && *s.tick_at == now();
    if (is_tick) s.tick_at.reset();

    rebalance(dc);

    if (is_tick) {
      const bool waiting = std::any_of(s.dc.vms.begin(), s.dc.vms.end(),
                                       [](const VmInstance& v) { return !v.queue.empty(); });
      if (waiting) arm_tick(dc);
    }
  }

  void rebalance(std::uint32_t dc) {
    DcState& s = dcs_[dc];
    std::vector<VmInstance>& vms = s.dc.vms;
    const std::size_t n = vms.size();
    if (n < 2) return;

    std::vector<std::size_t> loads(n);
    for (std::size_t v = 0; v < n; ++v) loads[v] = vms[v].queue.size() + (vms[v].running ? 1 : 0);
    std::vector<Handle> moved;

    for (VmIndex v = 0; v < n; ++v) {
      for (;;) {
        const std::size_t total = std::accumulate(loads.begin(), loads.end(), std::size_t{0});
        if (loads[v] * n <= total) break;

        // Tail first: the job with the most work ahead of it.
        std::optional<Handle> pick;
        for (auto it = vms[v].queue.rbegin(); it != vms[v].queue.rend(); ++it) {
          const Job& j = job(*it);
          if (j.migrations >= cfg_.policy.migration_cap) continue;
          if (std::find(moved.begin(), moved.end(), *it) != moved.end()) continue;
          pick = *it;
          break;
        }
        if (!pick) break;

        std::vector<VmWait> candidates;
        for (VmIndex c : underutilized_vms(loads)) {
          if (c == v) continue;
          candidates.push_back({c, expected_wait(vms[c], jobs_, now())});
        }
        const Duration stay = expected_wait(vms[v], jobs_, now(), *pick);
        const MigrationDecision d = migration_decision(stay, v, candidates, s.hops);
        if (!d.migrate()) break;

        const VmIndex target = *d.target;
        Job& j = job(*pick);
        auto& from = vms[v].queue;
        from.erase(std::find(from.begin(), from.end(), *pick));
        vms[target].queue.push_back(*pick);
        j.ready_at = now() + s.hops.at(v, target);
        j.vm_history.push_back(target);
        ++j.migrations;
        moved.push_back(*pick);
        --loads[v];
        ++loads[target];
        metrics_.migrations.push_back({j.id, s.dc.id, v, target, now(), d.stay_wait, d.move_wait});
        request_start(dc, target, now());
        request_start(dc, v, now());
      }
    }
  }

  // -------------------------------------------------------------------------

  RunMetrics collect() {
    RunMetrics& m = metrics_;
    m.scenario = source_.name;
    m.time_unit = source_.time_unit;
    m.horizon = cfg_.horizon;
    m.events_processed = calendar_.popped();
    m.starvation_threshold = cfg_.policy.starvation_threshold;
    if (!m.starvation_threshold && cfg_.policy.admission.mode == AdmissionMode::Deadline) {
      m.starvation_threshold = cfg_.policy.admission.deadline;
    }
    m.submitted = jobs_.size();
    for (const Job& j : jobs_) {
      if (j.state != JobState::Completed && j.state != JobState::Rejected) {
        throw Error("job " + std::to_string(j.id) + " did not reach a terminal state");
      }
      JobTrace t;
      t.id = j.id;
      t.origin_ub = j.origin_ub;
      t.datacenter = dcs_[j.dc].dc.id;
      t.arrival = j.arrival;
      t.start = j.start_time;
      t.finish = j.finish_time;
      t.rejected_at = j.rejected_at;
      if (j.start_time) t.vm_history = j.vm_history;
      t.state = j.state;
      t.reject_reason = j.reject_reason;
      t.requests = j.requests;
      t.transfer = transfer_time(j.data_size, dcs_[j.dc].bandwidth_per_ms);
      (j.state == JobState::Completed ? m.completed : m.rejected) += 1;
      m.jobs.push_back(std::move(t));
    }
    return std::move(metrics_);
  }

  const ScenarioConfig& source_;
  ScenarioConfig cfg_;
  RunOptions options_;
  EventCalendar calendar_;
  std::vector<DcState> dcs_;
  std::vector<Job> jobs_;
  RunMetrics metrics_;
};

}  // namespace

RunMetrics run(const ScenarioConfig& scenario, const RunOptions& options) {
  validate(scenario);
  return Simulation(scenario, options).run();
}

}  // namespace cloudq
