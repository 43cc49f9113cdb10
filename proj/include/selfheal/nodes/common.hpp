#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfheal/core/envelope.hpp"
#include "selfheal/core/node.hpp"

namespace selfheal::nodes {

/// MQTT-style topic filter: "+" matches one level, a trailing "#" matches the rest.
bool topic_matches(std::string_view filter, std::string_view topic);

/// Numeric payload or std::invalid_argument.
double require_number(const Payload& payload, std::string_view what);

enum class Aggregate { Last, First, Avg, Max, Min };

std::optional<Aggregate> parse_aggregate(std::string_view name);

/// Reduces `values` (oldest first). Throws std::invalid_argument when empty or
/// when a numeric aggregate meets a non-numeric value. The mean sums from the
/// oldest value forward.
Payload aggregate(Aggregate how, std::span<const Payload> values);

/// Convenience: emit `payload` on `port`, keeping the triggering topic/corr.
inline void forward(NodeContext& ctx, int port, const Envelope& e, Payload payload) {
  ctx.emit(port, Message{e.topic, std::move(payload), e.corr});
}

}  // namespace selfheal::nodes
