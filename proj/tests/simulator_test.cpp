#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"

#include "cloudq/error.hpp"
#include "cloudq/output.hpp"
#include "cloudq/policies.hpp"
#include "cloudq/simulator.hpp"
#include "test_support.hpp"

using namespace cloudq;
using cloudq::testing::explicit_scenario;

namespace {

ScenarioConfig golden(std::string_view name) { return load_scenario(*embedded_scenario(name)); }

void check_conservation(const RunMetrics& m) {
  CHECK(m.submitted == m.jobs.size());
  CHECK(m.completed + m.rejected == m.submitted);
  std::uint64_t completed = 0, rejected = 0;
  for (const JobTrace& t : m.jobs) {
    if (t.state == JobState::Completed) {
      ++completed;
      REQUIRE(t.start);
      REQUIRE(t.finish);
      CHECK(*t.start >= t.arrival);
      CHECK(*t.finish >= *t.start);
    } else {
      REQUIRE(t.state == JobState::Rejected);
      ++rejected;
      CHECK(t.rejected_at);
      CHECK_FALSE(t.finish);
    }
  }
  CHECK(completed == m.completed);
  CHECK(rejected == m.rejected);
}

ScenarioConfig imbalance_instance(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n(4, 30), gap(1, 12), longb(10, 40), shortb(1, 3);
  std::vector<ExplicitJob> jobs;
  SimTime t = 0;
  const int count = n(gen);
  for (int i = 1; i <= count; ++i) {
    jobs.push_back({static_cast<JobId>(i), t, double(i % 2 ? longb(gen) : shortb(gen))});
    t += gap(gen);
  }
  ScenarioConfig cfg = explicit_scenario(2, jobs);
  cfg.policy.migration = true;
  cfg.policy.hop_time = std::uniform_real_distribution<double>(0, 5)(gen);
  cfg.policy.migration_interval = 5;
  cfg.policy.admission.deadline = 150;
  return cfg;
}

void check_migration_invariants(const ScenarioConfig& cfg, const RunMetrics& m) {
  std::map<JobId, std::vector<const MigrationRecord*>> by_job;
  for (const MigrationRecord& r : m.migrations) {
    CHECK(r.move_wait < r.stay_wait);
    CHECK(r.from != r.to);
    by_job[r.job].push_back(&r);
  }
  for (const JobTrace& t : m.jobs) {
    const auto& recs = by_job[t.id];
    CHECK(recs.size() <= cfg.policy.migration_cap);
    if (t.start) {
      CHECK(t.vm_history.size() == recs.size() + 1);
      if (!recs.empty()) CHECK(*t.start >= recs.back()->at + cfg.policy.hop_time);
    } else {
      CHECK(t.vm_history.empty());
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(recs[i]->from == t.vm_history.at(i));
      CHECK(recs[i]->to == t.vm_history.at(i + 1));
    }
  }
}

}  // namespace

TEST_CASE("round robin spreads simultaneous jobs evenly in the engine") {
  for (std::uint32_t vms : {1u, 3u, 20u, 40u}) {
    std::vector<ExplicitJob> jobs;
    for (JobId id = 1; id <= 3 * vms; ++id) jobs.push_back({id, 0, 1});
    const RunMetrics m = run(explicit_scenario(vms, jobs));
    std::vector<int> per_vm(vms, 0);
    for (const JobTrace& t : m.jobs) {
      REQUIRE(t.vm_history.size() == 1);
      CHECK(t.vm_history[0] == (t.id - 1) % vms);
      ++per_vm[t.vm_history[0]];
    }
    CHECK(std::all_of(per_vm.begin(), per_vm.end(), [](int c) { return c == 3; }));
  }
}

TEST_CASE("round robin ignores load") {
  // VM 0 gets a long job; the wheel still sends job 3 back to it.
  const RunMetrics m = run(explicit_scenario(2, {{1, 0, 100}, {2, 1, 1}, {3, 2, 1}}));
  CHECK(m.jobs[2].vm_history == std::vector<VmIndex>{0});
  CHECK(*m.jobs[2].start == 100);
}

TEST_CASE("queue cap rejects arrivals once every queue is full") {
  ScenarioConfig cfg = explicit_scenario(1, {{1, 0, 10}, {2, 1, 10}, {3, 2, 10}, {4, 3, 10}});
  cfg.policy.admission = {AdmissionMode::QueueCap, 0, 1};
  const RunMetrics m = run(cfg);
  CHECK(m.completed == 2);
  CHECK(m.rejected == 2);
  CHECK(m.jobs[2].reject_reason == RejectReason::QueueFull);
  CHECK(*m.jobs[2].rejected_at == 2);
  CHECK(*m.jobs[1].start == 10);
}

TEST_CASE("queue cap skips full VMs on the wheel") {
  ScenarioConfig cfg = explicit_scenario(2, {{1, 0, 50}, {2, 0, 50}, {3, 1, 1}, {4, 2, 1}, {5, 3, 1}});
  cfg.policy.admission = {AdmissionMode::QueueCap, 0, 1};
  const RunMetrics m = run(cfg);
  CHECK(m.jobs[2].vm_history == std::vector<VmIndex>{0});
  CHECK(m.jobs[3].vm_history == std::vector<VmIndex>{1});
  CHECK(m.jobs[4].state == JobState::Rejected);
  check_conservation(m);
}

TEST_CASE("deadline rejects jobs still waiting when it expires") {
  ScenarioConfig cfg = explicit_scenario(1, {{1, 0, 20}, {2, 1, 5}, {3, 2, 5}});
  cfg.policy.admission.deadline = 20;
  const RunMetrics m = run(cfg);
  CHECK(m.jobs[0].state == JobState::Completed);
  CHECK(m.jobs[1].state == JobState::Completed);  // starts at 20, deadline 21
  CHECK(m.jobs[2].state == JobState::Rejected);   // would start at 25, deadline 22
  CHECK(*m.jobs[2].rejected_at == 22);
  CHECK(m.jobs[2].reject_reason == RejectReason::DeadlineExpired);
}

TEST_CASE("shortest job first in the engine matches the offline schedule") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> arrival(0, 40), burst(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ExplicitJob> jobs;
    std::vector<ReadyEntry> entries;
    for (JobId id = 1; id <= 10; ++id) {
      jobs.push_back({id, double(arrival(gen)), double(burst(gen))});
      entries.push_back({id, jobs.back().arrival, jobs.back().burst});
    }
    ScenarioConfig cfg = explicit_scenario(1, jobs);
    cfg.policy.scheduler = SchedulerKind::ShortestJobFirst;
    const RunMetrics m = run(cfg);
    const Schedule s = sjf_schedule(entries);
    for (const JobTrace& t : m.jobs) CHECK(*t.start == s.start.at(t.id));
  }
}

TEST_CASE("shortest job first across several VMs keeps every VM busy") {
  ScenarioConfig cfg = explicit_scenario(2, {{1, 0, 10}, {2, 0, 10}, {3, 1, 7}, {4, 1, 2}, {5, 1, 4}});
  cfg.policy.scheduler = SchedulerKind::ShortestJobFirst;
  const RunMetrics m = run(cfg);
  CHECK(*m.jobs[3].start == 10);
  CHECK(*m.jobs[4].start == 10);
  CHECK(*m.jobs[2].start == 12);
}

TEST_CASE("migration relieves the overloaded VM") {
  const ScenarioConfig on = golden("migration_imbalance.scn");
  ScenarioConfig off = on;
  off.policy.migration = false;
  const RunMetrics m_on = run(on);
  const RunMetrics m_off = run(off);
  CHECK(m_off.migrations.empty());
  CHECK_FALSE(m_on.migrations.empty());
  CHECK(m_on.rejected <= m_off.rejected);
  CHECK(m_off.rejected > 0);
  check_migration_invariants(on, m_on);
  check_conservation(m_on);
  check_conservation(m_off);
}

TEST_CASE("migration cap of zero disables moves") {
  ScenarioConfig cfg = golden("migration_imbalance.scn");
  cfg.policy.migration_cap = 0;
  CHECK(run(cfg).migrations.empty());
}

TEST_CASE("migration invariants over random imbalanced instances") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 150; ++trial) {
    const ScenarioConfig cfg = imbalance_instance(gen);
    const RunMetrics m = run(cfg);
    check_conservation(m);
    check_migration_invariants(cfg, m);
  }
}

TEST_CASE("per-pair hop entries override the uniform hop") {
  ScenarioConfig cfg = golden("migration_imbalance.scn");
  cfg.policy.hops.push_back({"DC1", 0, 1, 7});
  const RunMetrics m = run(cfg);
  for (const MigrationRecord& r : m.migrations) {
    const JobTrace& t = *std::find_if(m.jobs.begin(), m.jobs.end(),
                                      [&](const JobTrace& j) { return j.id == r.job; });
    if (t.start && r.from == 0) CHECK(*t.start >= r.at + 7);
  }
}

TEST_CASE("every golden scenario conserves jobs") {
  for (std::string_view name : embedded_scenario_names()) {
    CAPTURE(name);
    ScenarioConfig cfg = golden(name);
    check_conservation(run(cfg));
    if (cfg.policy.scheduler == SchedulerKind::RoundRobin && cfg.policy.migration == false) {
      cfg.policy.scheduler = SchedulerKind::ShortestJobFirst;
      check_conservation(run(cfg));
    }
  }
}

TEST_CASE("conservation under random queue caps and deadlines") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    ScenarioConfig cfg = imbalance_instance(gen);
    cfg.policy.migration = gen() % 2;
    if (gen() % 2) {
      cfg.policy.admission = {AdmissionMode::QueueCap, 0, static_cast<std::uint32_t>(1 + gen() % 3)};
    } else {
      cfg.policy.admission.deadline = 5 + double(gen() % 50);
    }
    if (!cfg.policy.migration && gen() % 2) cfg.policy.scheduler = SchedulerKind::ShortestJobFirst;
    check_conservation(run(cfg));
  }
}

TEST_CASE("job budget produces exactly that many jobs") {
  const ScenarioConfig cfg = golden("peak_sweep.scn");
  for (std::uint64_t budget : {1u, 5u, 17u, 30u, 101u}) {
    const auto split = split_job_budget(cfg, budget);
    CHECK(std::accumulate(split.begin(), split.end(), std::uint64_t{0}) == budget);
    RunOptions o;
    o.job_budget = budget;
    CHECK(run(cfg, o).submitted == budget);
  }
  RunOptions o;
  o.job_budget = 3;
  CHECK_THROWS_AS(run(golden("table6_demo.scn"), o), ValidationError);
}

TEST_CASE("runs are deterministic") {
  const ScenarioConfig cfg = golden("peak_sweep.scn");
  RunOptions o;
  o.job_budget = 30;
  o.record_events = true;
  const RunMetrics a = run(cfg, o);
  const RunMetrics b = run(cfg, o);
  CHECK(render_jobs_csv(a) == render_jobs_csv(b));
  CHECK(a.event_log.size() == b.event_log.size());
  CHECK(a.events_processed == a.event_log.size());
  for (std::size_t i = 0; i < a.event_log.size(); ++i) {
    CHECK(a.event_log[i].fire_at == b.event_log[i].fire_at);
    CHECK(a.event_log[i].kind == b.event_log[i].kind);
  }
  ScenarioConfig other = cfg;
  other.seed = 8;
  CHECK(render_jobs_csv(run(other, o)) != render_jobs_csv(a));
}

TEST_CASE("event cap stops a runaway run") {
  ScenarioConfig cfg = golden("paper_tables.scn");
  cfg.policy.event_cap = 100;
  CHECK_THROWS_AS(run(cfg), HorizonExceeded);
}
