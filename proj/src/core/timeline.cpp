#include "selfheal/core/timeline.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace selfheal {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::Emit, "emit"},
    {EventKind::Deliver, "deliver"},
    {EventKind::Drop, "drop"},
    {EventKind::Fault, "fault"},
    {EventKind::RoleChange, "role-change"},
    {EventKind::Timer, "timer"},
    {EventKind::Error, "error"},
}};

void append_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
}

// Splits one CSV record starting at `pos`; advances `pos` past the record's
// line terminator.
std::vector<std::string> read_record(std::string_view text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw std::runtime_error("unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return fields;
}

template <typename T>
T parse_int(const std::string& s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) {
      return name;
    }
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) {
      return k;
    }
  }
  return std::nullopt;
}

void TimelineLog::append(LogEntry entry) {
  if (!entries_.empty() && entry.time < entries_.back().time) {
    throw std::logic_error("TimelineLog: entry at " + std::to_string(entry.time) +
                           " precedes last entry at " + std::to_string(entries_.back().time));
  }
  entries_.push_back(std::move(entry));
}

std::string TimelineLog::to_csv() const {
  std::string out(kTimelineHeader);
  out.push_back('\n');
  for (const auto& e : entries_) {
    out.append(std::to_string(e.time));
    out.push_back(',');
    append_field(out, e.instance);
    out.push_back(',');
    out.append(to_string(e.kind));
    out.push_back(',');
    append_field(out, e.node);
    out.push_back(',');
    if (e.port) {
      out.append(std::to_string(*e.port));
    }
    out.push_back(',');
    append_field(out, e.topic);
    out.push_back(',');
    append_field(out, e.value);
    out.push_back('\n');
  }
  return out;
}

TimelineLog TimelineLog::from_csv(std::string_view text) {
  TimelineLog log;
  std::size_t pos = 0;
  std::size_t line = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    ++line;
    std::vector<std::string> fields;
    try {
      fields = read_record(text, pos);
    } catch (const std::exception& e) {
      throw std::runtime_error("timeline line " + std::to_string(line) + ": " + e.what());
    }
    if (fields.size() == 1 && fields[0].empty()) {
      continue;
    }
    if (!header_seen) {
      std::string joined;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        joined += (i ? "," : "") + fields[i];
      }
      if (joined != kTimelineHeader) {
        throw std::runtime_error("timeline line 1: unexpected header '" + joined + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 7) {
      throw std::runtime_error("timeline line " + std::to_string(line) + ": expected 7 fields, got " +
                               std::to_string(fields.size()));
    }
    try {
      LogEntry e;
      e.time = parse_int<TimeMs>(fields[0], "time");
      e.instance = fields[1];
      auto kind = parse_event_kind(fields[2]);
      if (!kind) {
        throw std::runtime_error("unknown event '" + fields[2] + "'");
      }
      e.kind = *kind;
      e.node = fields[3];
      if (!fields[4].empty()) {
        e.port = parse_int<int>(fields[4], "port");
      }
      e.topic = fields[5];
      e.value = fields[6];
      log.append(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error("timeline line " + std::to_string(line) + ": " + ex.what());
    }
  }
  if (!header_seen) {
    throw std::runtime_error("timeline: missing header");
  }
  return log;
}

}  // namespace selfheal
