#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/core/node.hpp"
#include "selfheal/nodes/common.hpp"

namespace selfheal::nodes {

enum class Pace { TooFast = 0, Normal = 1, TooSlow = 2 };

std::string_view to_string(Pace pace);

struct TimingConfig {
  TimeMs expected = 0;
  double tolerance = 0.0;
};

/// Classifies inter-arrival gaps against an expected period. The first
/// arrival has no gap and counts as normal.
class TimingClassifier {
 public:
  explicit TimingClassifier(TimingConfig cfg) : cfg_(cfg) {}

  Pace observe(TimeMs arrival);

 private:
  TimingConfig cfg_;
  std::optional<TimeMs> last_;
};

/// Egress per class: tooFast, normal, tooSlow.
class TimingCheckNode final : public Node {
 public:
  explicit TimingCheckNode(TimingConfig cfg) : classifier_(cfg) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  TimingClassifier classifier_;
};

enum class DebounceStrategy { Last, First, Avg, DropExtra };

struct DebounceConfig {
  TimeMs window = 0;
  DebounceStrategy strategy = DebounceStrategy::Last;
};

/// Rate limiter with aggregation. A message arriving while idle passes at
/// once and opens a window; later messages in the window are held and
/// summarized at window close (drop-extra discards them). An emission at
/// close opens the next window, so there is at most one emission per window.
class DebounceNode final : public Node {
 public:
  explicit DebounceNode(DebounceConfig cfg) : cfg_(cfg) {}

  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

 private:
  DebounceConfig cfg_;
  std::optional<TimerId> window_;
  std::vector<Envelope> held_;
};

struct ActionAuditConfig {
  TimeMs timeout = 0;
  std::string match = "#";
};

/// Ingress 0 takes triggers, ingress 1 acknowledgements. Each trigger waits
/// for a matching ack until its timeout: egress 0 confirms, egress 1 reports
/// failure. Acks after a failure, or with nothing pending, are ignored.
class ActionAuditNode final : public Node {
 public:
  explicit ActionAuditNode(ActionAuditConfig cfg) : cfg_(std::move(cfg)) {}

  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

  std::size_t pending() const { return pending_.size(); }

 private:
  struct Pending {
    Envelope trigger;
    TimerId timer;
  };

  ActionAuditConfig cfg_;
  std::deque<Pending> pending_;
};

}  // namespace selfheal::nodes
