#pragma once

#include <optional>

#include "selfheal/core/envelope.hpp"

namespace selfheal {

/// Report-by-exception: passes a message only when its payload differs
/// (deep equality) from the last one passed.
class ReportByException {
 public:
  /// Returns the envelope when it should be forwarded.
  std::optional<Envelope> process(const Envelope& e);

  const std::optional<Payload>& last() const { return last_; }

 private:
  std::optional<Payload> last_;
};

}  // namespace selfheal
