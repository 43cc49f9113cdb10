#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <utility>

#include "selfheal/core/envelope.hpp"

namespace selfheal {

using EventId = std::uint64_t;

/// Virtual clock with a pending-event queue.
///
/// Events fire in (fire-time, sequence-number) order, where the sequence
/// number is assigned at scheduling time. Two events scheduled for the same
/// instant therefore fire in creation order, which is what makes runs
/// reproducible. The clock never moves backwards.
class Scheduler {
 public:
  using Callback = std::function<void()>;

  TimeMs now() const { return now_; }

  /// Schedules `cb` at absolute time `at`. Throws std::invalid_argument when
  /// `at` lies in the past.
  EventId schedule_at(TimeMs at, Callback cb);
  EventId schedule_after(TimeMs delay, Callback cb) { return schedule_at(now_ + delay, std::move(cb)); }

  /// Returns false when the event already fired or was cancelled.
  bool cancel(EventId id);

  bool is_pending(EventId id) const { return index_.contains(id); }
  std::size_t pending() const { return queue_.size(); }

  /// Fire time of the earliest pending event, if any.
  std::optional<TimeMs> next_time() const;

  /// Fires the earliest event if its time is <= limit. Returns false when
  /// nothing was fired.
  bool step(TimeMs limit);

  /// Processes every event with fire-time <= t_end, including events
  /// scheduled by callbacks along the way, then sets the clock to t_end.
  void run_until(TimeMs t_end);

 private:
  using Key = std::pair<TimeMs, EventId>;

  TimeMs now_ = 0;
  EventId next_id_ = 1;
  std::map<Key, Callback> queue_;
  std::unordered_map<EventId, TimeMs> index_;
};

}  // namespace selfheal
