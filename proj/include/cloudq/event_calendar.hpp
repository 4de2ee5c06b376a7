#pragma once

#include <cstdint>
#include <queue>
#include <string_view>
#include <vector>

#include "cloudq/time.hpp"

namespace cloudq {

enum class EventKind : std::uint8_t {
  JobArrival,
  JobStart,
  JobFinish,
  MigrationCheck,
  DeadlineExpiry,
};

std::string_view to_string(EventKind kind) noexcept;

inline constexpr std::uint32_t kNoId = UINT32_MAX;

/// Identifiers the handler needs; unused fields hold kNoId.
struct EventPayload {
  std::uint32_t job = kNoId;
  std::uint32_t vm = kNoId;
  std::uint32_t dc = kNoId;

  friend bool operator==(const EventPayload&, const EventPayload&) = default;
};

/// (fire_at, seq) is unique and totally ordered; seq is assigned by the
/// calendar on insertion.
struct Event {
  SimTime fire_at = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::JobArrival;
  EventPayload payload;

  friend bool operator==(const Event&, const Event&) = default;
};

using EventHandle = std::uint64_t;

/// Event calendar with a monotone virtual clock. Events with equal fire
/// times pop in insertion order.
class EventCalendar {
 public:
  /// Throws PastEvent if `fire_at` is earlier than the current clock.
  EventHandle schedule(SimTime fire_at, EventKind kind, EventPayload payload = {});

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  SimTime now() const noexcept { return now_; }
  std::uint64_t popped() const noexcept { return popped_; }

  /// Removes the earliest event and advances the clock to its fire time.
  /// Throws EmptyQueue when nothing is scheduled.
  Event pop();

  const Event& peek() const;

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t popped_ = 0;
};

}  // namespace cloudq
