#pragma once

#include <cstddef>
#include <cstdint>
#include <set>

#include "cloudq/time.hpp"

namespace cloudq {

using JobId = std::uint32_t;

struct ReadyEntry {
  JobId id = 0;
  SimTime arrival = 0;
  Duration burst = 0;

  friend bool operator==(const ReadyEntry&, const ReadyEntry&) = default;
};

/// Jobs waiting for a server, ordered shortest burst first; ties go to the
/// earlier arrival, then the smaller id.
class ReadyQueue {
 public:
  struct ShortestFirst {
    bool operator()(const ReadyEntry& a, const ReadyEntry& b) const noexcept {
      if (a.burst != b.burst) return a.burst < b.burst;
      if (a.arrival != b.arrival) return a.arrival < b.arrival;
      return a.id < b.id;
    }
  };
  using Set = std::set<ReadyEntry, ShortestFirst>;

  bool insert(const ReadyEntry& entry) { return entries_.insert(entry).second; }
  bool erase(const ReadyEntry& entry) { return entries_.erase(entry) == 1; }

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  Set::const_iterator begin() const noexcept { return entries_.begin(); }
  Set::const_iterator end() const noexcept { return entries_.end(); }

 private:
  Set entries_;
};

}  // namespace cloudq
