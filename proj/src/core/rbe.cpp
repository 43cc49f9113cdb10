#include "selfheal/core/rbe.hpp"

namespace selfheal {

std::optional<Envelope> ReportByException::process(const Envelope& e) {
  if (last_ && *last_ == e.payload) {
    return std::nullopt;
  }
  last_ = e.payload;
  return e;
}

}  // namespace selfheal
