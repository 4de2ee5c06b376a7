#include "cloudq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cloudq/error.hpp"

namespace cloudq {

std::string_view to_string(SchedulerKind kind) noexcept {
  return kind == SchedulerKind::ShortestJobFirst ? "sjf" : "rr";
}

std::string_view to_string(AdmissionMode mode) noexcept {
  return mode == AdmissionMode::QueueCap ? "queue_cap" : "deadline";
}

std::string_view to_string(BandwidthUnit unit) noexcept {
  return unit == BandwidthUnit::PerS ? "per_s" : "per_ms";
}

const DatacenterSpec* ScenarioConfig::find_datacenter(std::string_view id) const noexcept {
  for (const auto& dc : datacenters) {
    if (dc.id == id) return &dc;
  }
  return nullptr;
}

std::size_t ScenarioConfig::datacenter_index(const ExplicitJob& job) const {
  if (job.datacenter.empty()) {
    if (datacenters.size() != 1) {
      throw ValidationError("job " + std::to_string(job.id) +
                            " must name a datacenter when several exist");
    }
    return 0;
  }
  for (std::size_t i = 0; i < datacenters.size(); ++i) {
    if (datacenters[i].id == job.datacenter) return i;
  }
  throw ValidationError("job " + std::to_string(job.id) + " targets unknown datacenter " +
                        job.datacenter);
}

namespace {

// ---------------------------------------------------------------------------
// Lexing: sections of key/value entries or whitespace-separated rows.

struct Token {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Entry {
  Token key;
  Token value;
};

struct Section {
  std::string kind;
  std::string id;
  std::size_t line = 0;
  std::vector<Entry> entries;
  std::vector<std::vector<Token>> rows;
};

bool is_table_section(std::string_view kind) { return kind == "jobs" || kind == "hops"; }

bool valid_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::vector<Section> lex(std::string_view source) {
  static const std::set<std::string, std::less<>> kSingletons = {"scenario", "advanced",
                                                                 "policy", "jobs", "hops"};
  static const std::set<std::string, std::less<>> kKeyed = {"userbase", "datacenter"};

  std::vector<Section> sections;
  std::set<std::string> seen_singletons;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t eol = source.find('\n', pos);
    if (eol == std::string_view::npos) eol = source.size();
    std::string_view line = source.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t first = 0;
    while (first < line.size() && is_space(line[first])) ++first;
    std::size_t last = line.size();
    while (last > first && is_space(line[last - 1])) --last;
    if (first == last) continue;
    const std::string_view body = line.substr(first, last - first);
    const std::size_t col = first + 1;

    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("unterminated section header", line_no, col);
      const std::string_view name = body.substr(1, body.size() - 2);
      Section s;
      s.line = line_no;
      if (auto dot = name.find('.'); dot != std::string_view::npos) {
        s.kind = std::string(name.substr(0, dot));
        s.id = std::string(name.substr(dot + 1));
        if (!kKeyed.contains(s.kind)) {
          throw UnknownKey("unknown section [" + std::string(name) + "]", line_no, col);
        }
        if (!valid_identifier(s.id)) {
          throw ParseError("invalid " + s.kind + " id '" + s.id + "'", line_no, col + 1 + dot + 1);
        }
      } else {
        s.kind = std::string(name);
        if (kKeyed.contains(s.kind)) {
          throw ParseError("section [" + s.kind + "] needs an id, e.g. [" + s.kind + ".X]",
                           line_no, col);
        }
        if (!kSingletons.contains(s.kind)) {
          throw UnknownKey("unknown section [" + s.kind + "]", line_no, col);
        }
        if (!seen_singletons.insert(s.kind).second) {
          throw ParseError("duplicate section [" + s.kind + "]", line_no, col);
        }
      }
      sections.push_back(std::move(s));
      continue;
    }

    if (sections.empty()) throw ParseError("content outside any section", line_no, col);
    Section& current = sections.back();

    if (is_table_section(current.kind)) {
      std::vector<Token> row;
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && is_space(body[i])) ++i;
        const std::size_t start = i;
        while (i < body.size() && !is_space(body[i])) ++i;
        if (start < i) row.push_back({std::string(body.substr(start, i - start)), line_no, col + start});
      }
      current.rows.push_back(std::move(row));
      continue;
    }

    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, col);
    std::string_view key = body.substr(0, eq);
    while (!key.empty() && is_space(key.back())) key.remove_suffix(1);
    std::size_t vstart = eq + 1;
    while (vstart < body.size() && is_space(body[vstart])) ++vstart;
    if (key.empty()) throw ParseError("missing key", line_no, col);
    if (vstart >= body.size()) {
      throw ParseError("missing value for '" + std::string(key) + "'", line_no, col + eq + 1);
    }
    for (const Entry& e : current.entries) {
      if (e.key.text == key) {
        throw ParseError("duplicate key '" + std::string(key) + "'", line_no, col);
      }
    }
    current.entries.push_back({{std::string(key), line_no, col},
                               {std::string(body.substr(vstart)), line_no, col + vstart}});
  }
  return sections;
}

// ---------------------------------------------------------------------------
// Typed value parsing.

double parse_number(const Token& t) {
  double v = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ParseError("expected a number, got '" + t.text + "'", t.line, t.column);
  }
  return v;
}

template <typename Int>
Int parse_integer(const Token& t) {
  Int v = 0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("expected a non-negative integer, got '" + t.text + "'", t.line, t.column);
  }
  return v;
}

std::vector<double> parse_number_list(const Token& t) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= t.text.size()) {
    std::size_t comma = t.text.find(',', start);
    if (comma == std::string::npos) comma = t.text.size();
    std::string item = t.text.substr(start, comma - start);
    std::size_t lead = 0;
    while (lead < item.size() && is_space(item[lead])) ++lead;
    item.erase(0, lead);
    while (!item.empty() && is_space(item.back())) item.pop_back();
    out.push_back(parse_number({item, t.line, t.column + start + lead}));
    start = comma + 1;
  }
  return out;
}

template <typename Enum>
Enum parse_enum(const Token& t, std::initializer_list<std::pair<std::string_view, Enum>> options) {
  std::string expected;
  for (const auto& [name, value] : options) {
    if (t.text == name) return value;
    if (!expected.empty()) expected += "|";
    expected += name;
  }
  throw ParseError("expected " + expected + ", got '" + t.text + "'", t.line, t.column);
}

std::string where(const Section& s) {
  std::string name = s.id.empty() ? s.kind : s.kind + "." + s.id;
  return "[" + name + "] (line " + std::to_string(s.line) + ")";
}

/// Dispatches each entry of a section to its handler; unknown keys are fatal
/// and missing required keys are validation errors.
class KeyReader {
 public:
  explicit KeyReader(const Section& s) : section_(s) {}

  template <typename Fn>
  KeyReader& on(std::string_view key, Fn&& fn, bool required = false) {
    known_.insert(std::string(key));
    if (const Token* v = find(key)) {
      fn(*v);
    } else if (required) {
      throw ValidationError(where(section_) + " is missing required key '" + std::string(key) + "'");
    }
    return *this;
  }

  void finish() const {
    for (const Entry& e : section_.entries) {
      if (!known_.contains(e.key.text)) {
        throw UnknownKey("unknown key '" + e.key.text + "' in " + where(section_), e.key.line,
                         e.key.column);
      }
    }
  }

  bool has(std::string_view key) const { return find(key) != nullptr; }

 private:
  const Token* find(std::string_view key) const {
    for (const Entry& e : section_.entries) {
      if (e.key.text == key) return &e.value;
    }
    return nullptr;
  }

  const Section& section_;
  std::set<std::string, std::less<>> known_;
};

constexpr bool kRequired = true;

}  // namespace

ScenarioConfig load_scenario(std::string_view source) {
  const std::vector<Section> sections = lex(source);
  ScenarioConfig cfg;
  bool have_scenario = false;
  bool interval_set = false;
  // Per-user-base grouping overrides, resolved once [advanced] is known.
  std::map<std::size_t, std::pair<std::optional<std::uint32_t>, std::optional<std::uint32_t>>>
      grouping;
  std::set<std::string> dc_ids, ub_ids;

  for (const Section& s : sections) {
    KeyReader r(s);
    if (s.kind == "scenario") {
      have_scenario = true;
      r.on("name", [&](const Token& v) { cfg.name = v.text; }, kRequired)
          .on("time_unit",
              [&](const Token& v) {
                cfg.time_unit = parse_enum<TimeUnit>(v, {{"ms", TimeUnit::Ms}, {"hours", TimeUnit::Hours}});
              },
              kRequired)
          .on("horizon", [&](const Token& v) { cfg.horizon = parse_number(v); }, kRequired)
          .on("seed", [&](const Token& v) { cfg.seed = parse_integer<std::uint64_t>(v); })
          .finish();
    } else if (s.kind == "advanced") {
      r.on("user_grouping", [&](const Token& v) { cfg.advanced.user_grouping = parse_integer<std::uint32_t>(v); })
          .on("request_grouping",
              [&](const Token& v) { cfg.advanced.request_grouping = parse_integer<std::uint32_t>(v); })
          .on("instruction_length", [&](const Token& v) { cfg.advanced.instruction_length = parse_number(v); })
          .finish();
    } else if (s.kind == "datacenter") {
      if (!dc_ids.insert(s.id).second) {
        throw ValidationError("duplicate datacenter id " + s.id + " at line " + std::to_string(s.line));
      }
      DatacenterSpec dc;
      dc.id = s.id;
      r.on("vms", [&](const Token& v) { dc.vm_count = parse_integer<std::uint32_t>(v); }, kRequired)
          .on("rate", [&](const Token& v) { dc.rate = parse_number(v); })
          .on("vm_rates", [&](const Token& v) { dc.vm_rates = parse_number_list(v); })
          .on("memory", [&](const Token& v) { dc.memory = parse_number(v); }, kRequired)
          .on("bandwidth", [&](const Token& v) { dc.bandwidth = parse_number(v); }, kRequired)
          .on("bandwidth_unit",
              [&](const Token& v) {
                dc.bandwidth_unit = parse_enum<BandwidthUnit>(
                    v, {{"per_ms", BandwidthUnit::PerMs}, {"per_s", BandwidthUnit::PerS}});
              },
              kRequired)
          .finish();
      cfg.datacenters.push_back(std::move(dc));
    } else if (s.kind == "userbase") {
      if (!ub_ids.insert(s.id).second) {
        throw ValidationError("duplicate user base id " + s.id + " at line " + std::to_string(s.line));
      }
      UserBase ub;
      ub.id = s.id;
      auto& [users, requests] = grouping[cfg.user_bases.size()];
      r.on("requests_per_user_per_hour", [&](const Token& v) { ub.requests_per_user_per_hour = parse_number(v); },
           kRequired)
          .on("data_size_per_request", [&](const Token& v) { ub.data_size_per_request = parse_number(v); },
              kRequired)
          .on("datacenter", [&](const Token& v) { ub.target_dc = v.text; }, kRequired)
          .on("user_grouping", [&](const Token& v) { users = parse_integer<std::uint32_t>(v); })
          .on("request_grouping", [&](const Token& v) { requests = parse_integer<std::uint32_t>(v); })
          .finish();
      cfg.user_bases.push_back(std::move(ub));
    } else if (s.kind == "policy") {
      PolicyConfig& p = cfg.policy;
      r.on("scheduler",
           [&](const Token& v) {
             p.scheduler = parse_enum<SchedulerKind>(
                 v, {{"rr", SchedulerKind::RoundRobin}, {"sjf", SchedulerKind::ShortestJobFirst}});
           })
          .on("migration", [&](const Token& v) { p.migration = parse_enum<bool>(v, {{"on", true}, {"off", false}}); })
          .on("admission",
              [&](const Token& v) {
                p.admission.mode = parse_enum<AdmissionMode>(
                    v, {{"deadline", AdmissionMode::Deadline}, {"queue_cap", AdmissionMode::QueueCap}});
              })
          .on("deadline", [&](const Token& v) { p.admission.deadline = parse_number(v); })
          .on("capacity", [&](const Token& v) { p.admission.capacity = parse_integer<std::uint32_t>(v); })
          .on("hop_time", [&](const Token& v) { p.hop_time = parse_number(v); })
          .on("migration_interval",
              [&](const Token& v) {
                p.migration_interval = parse_number(v);
                interval_set = true;
              })
          .on("migration_cap", [&](const Token& v) { p.migration_cap = parse_integer<std::uint32_t>(v); })
          .on("event_cap", [&](const Token& v) { p.event_cap = parse_integer<std::uint64_t>(v); })
          .on("starvation_threshold", [&](const Token& v) { p.starvation_threshold = parse_number(v); })
          .finish();
    } else if (s.kind == "hops") {
      for (const auto& row : s.rows) {
        if (row.size() != 4) {
          throw ParseError("hop rows are 'datacenter from_vm to_vm hop_time'", row.front().line,
                           row.front().column);
        }
        cfg.policy.hops.push_back({row[0].text, parse_integer<VmIndex>(row[1]),
                                   parse_integer<VmIndex>(row[2]), parse_number(row[3])});
      }
    } else if (s.kind == "jobs") {
      for (const auto& row : s.rows) {
        if (row.size() < 3 || row.size() > 5) {
          throw ParseError("job rows are 'id arrival burst [datacenter|-] [data_size]'",
                           row.front().line, row.front().column);
        }
        ExplicitJob job;
        job.id = parse_integer<JobId>(row[0]);
        job.arrival = parse_number(row[1]);
        job.burst = parse_number(row[2]);
        if (row.size() >= 4 && row[3].text != "-") job.datacenter = row[3].text;
        if (row.size() == 5) job.data_size = parse_number(row[4]);
        cfg.jobs.push_back(std::move(job));
      }
    }
  }

  if (!have_scenario) throw ValidationError("missing [scenario] section");
  for (auto& [index, overrides] : grouping) {
    UserBase& ub = cfg.user_bases[index];
    ub.user_grouping = overrides.first.value_or(cfg.advanced.user_grouping);
    ub.request_grouping = overrides.second.value_or(cfg.advanced.request_grouping);
  }
  if (!interval_set) cfg.policy.migration_interval = from_ms(10, cfg.time_unit);

  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'", 0, 0);
  std::ostringstream text;
  text << in.rdbuf();
  return load_scenario(text.str());
}

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  check(!cfg.name.empty(), "scenario name must not be empty");
  check(cfg.horizon > 0, "horizon must be positive");
  check(!cfg.datacenters.empty(), "at least one datacenter is required");

  std::set<std::string> ids;
  for (const DatacenterSpec& dc : cfg.datacenters) {
    const std::string at = "datacenter " + dc.id + ": ";
    check(ids.insert(dc.id).second, "duplicate datacenter id " + dc.id);
    check(dc.vm_count >= 1, at + "vms must be positive");
    check(dc.rate > 0, at + "rate must be positive");
    check(dc.vm_rates.empty() || dc.vm_rates.size() == dc.vm_count,
          at + "vm_rates must list one rate per VM");
    for (double r : dc.vm_rates) check(r > 0, at + "vm_rates must be positive");
    check(dc.memory > 0, at + "memory must be positive");
    check(dc.bandwidth > 0, at + "bandwidth must be positive");
  }

  const AdvancedConfig& adv = cfg.advanced;
  check(adv.user_grouping >= 1, "user_grouping must be positive");
  check(adv.request_grouping >= 1, "request_grouping must be positive");
  check(adv.instruction_length > 0, "instruction_length must be positive");

  ids.clear();
  for (const UserBase& ub : cfg.user_bases) {
    const std::string at = "user base " + ub.id + ": ";
    check(ids.insert(ub.id).second, "duplicate user base id " + ub.id);
    check(ub.requests_per_user_per_hour > 0, at + "requests_per_user_per_hour must be positive");
    check(ub.data_size_per_request >= 0, at + "data_size_per_request must not be negative");
    check(cfg.find_datacenter(ub.target_dc) != nullptr,
          at + "unknown datacenter '" + ub.target_dc + "'");
    check(ub.user_grouping >= 1 && ub.request_grouping >= 1, at + "grouping factors must be positive");
  }

  const PolicyConfig& p = cfg.policy;
  if (p.admission.mode == AdmissionMode::Deadline) {
    check(p.admission.deadline > 0, "deadline admission needs a positive deadline");
  } else {
    check(p.admission.capacity >= 1, "queue_cap admission needs capacity >= 1");
  }
  check(p.admission.deadline >= 0, "deadline must not be negative");
  check(p.hop_time >= 0, "hop_time must not be negative");
  check(p.migration_interval > 0, "migration_interval must be positive");
  check(p.event_cap >= 1, "event_cap must be positive");
  check(!p.starvation_threshold || *p.starvation_threshold > 0,
        "starvation_threshold must be positive");
  check(!(p.migration && p.scheduler == SchedulerKind::ShortestJobFirst),
        "migration requires the rr scheduler: sjf serves every VM from one shared queue");

  for (const HopEntry& h : p.hops) {
    const DatacenterSpec* dc = cfg.find_datacenter(h.datacenter);
    check(dc != nullptr, "hop entry names unknown datacenter '" + h.datacenter + "'");
    check(h.from < dc->vm_count && h.to < dc->vm_count,
          "hop entry " + h.datacenter + " " + std::to_string(h.from) + "->" + std::to_string(h.to) +
              " is outside the datacenter");
    check(h.hop >= 0, "hop times must not be negative");
    check(h.from != h.to || h.hop == 0, "hop time from a VM to itself must be 0");
  }

  std::set<JobId> job_ids;
  for (const ExplicitJob& j : cfg.jobs) {
    const std::string at = "job " + std::to_string(j.id) + ": ";
    check(j.id >= 1, "job ids must be positive");
    check(job_ids.insert(j.id).second, "duplicate job id " + std::to_string(j.id));
    check(j.arrival >= 0, at + "arrival must not be negative");
    check(j.burst >= 0, at + "burst must not be negative");
    check(j.data_size >= 0, at + "data_size must not be negative");
    (void)cfg.datacenter_index(j);
  }
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[scenario]\n"
      << "name = " << cfg.name << "\n"
      << "time_unit = " << to_string(cfg.time_unit) << "\n"
      << "horizon = " << num(cfg.horizon) << "\n"
      << "seed = " << cfg.seed << "\n";

  out << "\n[advanced]\n"
      << "user_grouping = " << cfg.advanced.user_grouping << "\n"
      << "request_grouping = " << cfg.advanced.request_grouping << "\n"
      << "instruction_length = " << num(cfg.advanced.instruction_length) << "\n";

  for (const DatacenterSpec& dc : cfg.datacenters) {
    out << "\n[datacenter." << dc.id << "]\n"
        << "vms = " << dc.vm_count << "\n"
        << "rate = " << num(dc.rate) << "\n";
    if (!dc.vm_rates.empty()) {
      out << "vm_rates = ";
      for (std::size_t i = 0; i < dc.vm_rates.size(); ++i) {
        out << (i ? "," : "") << num(dc.vm_rates[i]);
      }
      out << "\n";
    }
    out << "memory = " << num(dc.memory) << "\n"
        << "bandwidth = " << num(dc.bandwidth) << "\n"
        << "bandwidth_unit = " << to_string(dc.bandwidth_unit) << "\n";
  }

  for (const UserBase& ub : cfg.user_bases) {
    out << "\n[userbase." << ub.id << "]\n"
        << "requests_per_user_per_hour = " << num(ub.requests_per_user_per_hour) << "\n"
        << "data_size_per_request = " << num(ub.data_size_per_request) << "\n"
        << "datacenter = " << ub.target_dc << "\n"
        << "user_grouping = " << ub.user_grouping << "\n"
        << "request_grouping = " << ub.request_grouping << "\n";
  }

  const PolicyConfig& p = cfg.policy;
  out << "\n[policy]\n"
      << "scheduler = " << to_string(p.scheduler) << "\n"
      << "migration = " << (p.migration ? "on" : "off") << "\n"
      << "admission = " << to_string(p.admission.mode) << "\n"
      << "deadline = " << num(p.admission.deadline) << "\n"
      << "capacity = " << p.admission.capacity << "\n"
      << "hop_time = " << num(p.hop_time) << "\n"
      << "migration_interval = " << num(p.migration_interval) << "\n"
      << "migration_cap = " << p.migration_cap << "\n"
      << "event_cap = " << p.event_cap << "\n";
  if (p.starvation_threshold) out << "starvation_threshold = " << num(*p.starvation_threshold) << "\n";

  if (!p.hops.empty()) {
    out << "\n[hops]\n# datacenter from_vm to_vm hop_time\n";
    for (const HopEntry& h : p.hops) {
      out << h.datacenter << " " << h.from << " " << h.to << " " << num(h.hop) << "\n";
    }
  }

  if (!cfg.jobs.empty()) {
    out << "\n[jobs]\n# id arrival burst datacenter data_size\n";
    for (const ExplicitJob& j : cfg.jobs) {
      out << j.id << " " << num(j.arrival) << " " << num(j.burst) << " "
          << (j.datacenter.empty() ? "-" : j.datacenter) << " " << num(j.data_size) << "\n";
    }
  }
  return out.str();
}

ScenarioConfig normalized(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  const TimeUnit u = config.time_unit;
  c.time_unit = TimeUnit::Ms;
  c.horizon = to_ms(c.horizon, u);
  c.policy.admission.deadline = to_ms(c.policy.admission.deadline, u);
  c.policy.hop_time = to_ms(c.policy.hop_time, u);
  c.policy.migration_interval = to_ms(c.policy.migration_interval, u);
  if (c.policy.starvation_threshold) {
    c.policy.starvation_threshold = to_ms(*c.policy.starvation_threshold, u);
  }
  for (HopEntry& h : c.policy.hops) h.hop = to_ms(h.hop, u);
  for (ExplicitJob& j : c.jobs) {
    j.arrival = to_ms(j.arrival, u);
    j.burst = to_ms(j.burst, u);
  }
  return c;
}

}  // namespace cloudq
