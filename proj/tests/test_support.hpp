#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cloudq/scenario.hpp"

namespace cloudq::testing {

/// One datacenter, explicit jobs, times in ms.
inline ScenarioConfig explicit_scenario(std::uint32_t vms,
                                        const std::vector<ExplicitJob>& jobs) {
  ScenarioConfig cfg;
  cfg.name = "explicit";
  cfg.time_unit = TimeUnit::Ms;
  cfg.horizon = 1000;
  DatacenterSpec dc;
  dc.id = "DC1";
  dc.vm_count = vms;
  dc.memory = 512;
  dc.bandwidth = 1000;
  cfg.datacenters.push_back(dc);
  cfg.policy.admission.deadline = 1e9;
  cfg.jobs = jobs;
  return cfg;
}

inline std::vector<ExplicitJob> table6_jobs() {
  return {{1, 0, 8}, {2, 1, 4}, {3, 3, 6}, {4, 5, 2}, {5, 6, 5}};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 gen(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() /
           ("cloudq-" + tag + "-" + std::to_string(gen() % 1000000000));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace cloudq::testing
