#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfheal/core/envelope.hpp"

namespace selfheal {

enum class EventKind { Emit, Deliver, Drop, Fault, RoleChange, Timer, Error };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct LogEntry {
  TimeMs time = 0;
  std::string instance;
  EventKind kind = EventKind::Emit;
  std::string node;
  std::optional<int> port;
  std::string topic;
  /// Compact JSON rendering of the payload or event detail.
  std::string value;

  bool operator==(const LogEntry&) const = default;
};

inline constexpr std::string_view kTimelineHeader = "time_ms,instance,event,node,port,topic,value";

/// Append-only event record, ordered by (time, insertion order).
class TimelineLog {
 public:
  /// Throws std::logic_error if `entry.time` precedes the last entry.
  void append(LogEntry entry);

  const std::vector<LogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::string to_csv() const;

  /// Parses a document produced by to_csv(). Throws std::runtime_error with
  /// the offending line number on malformed input.
  static TimelineLog from_csv(std::string_view text);

 private:
  std::vector<LogEntry> entries_;
};

}  // namespace selfheal
