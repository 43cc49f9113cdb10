#include "selfheal/core/envelope.hpp"

namespace selfheal {

std::optional<double> as_number(const Payload& payload) {
  if (payload.is_number()) {
    return payload.get<double>();
  }
  return std::nullopt;
}

std::string compact(const Payload& payload) {
  return payload.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Payload error_payload(std::string_view kind, std::string_view detail) {
  return Payload{{"error", std::string(kind)}, {"detail", std::string(detail)}};
}

}  // namespace selfheal
