#include "cloudq/event_calendar.hpp"

#include <cmath>
#include <string>

#include "cloudq/error.hpp"

namespace cloudq {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::JobArrival: return "JobArrival";
    case EventKind::JobStart: return "JobStart";
    case EventKind::JobFinish: return "JobFinish";
    case EventKind::MigrationCheck: return "MigrationCheck";
    case EventKind::DeadlineExpiry: return "DeadlineExpiry";
  }
  return "?";
}

EventHandle EventCalendar::schedule(SimTime fire_at, EventKind kind,
                                    EventPayload payload) {
  if (std::isnan(fire_at) || fire_at < now_) {
    throw PastEvent("event at t=" + std::to_string(fire_at) +
                    " is earlier than clock t=" + std::to_string(now_));
  }
  const EventHandle handle = next_seq_++;
  heap_.push(Event{fire_at, handle, kind, payload});
  return handle;
}

const Event& EventCalendar::peek() const {
  if (heap_.empty()) throw EmptyQueue("event calendar is empty");
  return heap_.top();
}

Event EventCalendar::pop() {
  Event ev = peek();
  heap_.pop();
  now_ = ev.fire_at;
  ++popped_;
  return ev;
}

}  // namespace cloudq
