#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace selfheal {

/// Virtual milliseconds since run start.
using TimeMs = std::int64_t;

/// Message body: a number, a string or a key-value record. Equality is deep
/// structural equality, and numbers compare by value regardless of JSON
/// integer/float representation.
using Payload = nlohmann::json;

/// What a node hands to the engine when it emits. The engine stamps time,
/// source and port to turn it into an Envelope.
struct Message {
  std::string topic;
  Payload payload;
  std::optional<std::string> corr;
};

struct Envelope {
  TimeMs time = 0;
  std::string topic;
  Payload payload;
  std::string source;
  int port = 0;
  std::optional<std::string> corr;

  Message message() const { return Message{topic, payload, corr}; }
};

std::optional<double> as_number(const Payload& payload);

/// Compact single-line JSON, used for logs and persistence.
std::string compact(const Payload& payload);

/// Builds an error payload of the form {"error": kind, "detail": detail}.
Payload error_payload(std::string_view kind, std::string_view detail);

}  // namespace selfheal
