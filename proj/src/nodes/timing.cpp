#include "selfheal/nodes/timing.hpp"

#include <algorithm>

namespace selfheal::nodes {

std::string_view to_string(Pace pace) {
  switch (pace) {
    case Pace::TooFast: return "tooFast";
    case Pace::Normal: return "normal";
    case Pace::TooSlow: return "tooSlow";
  }
  return "?";
}

Pace TimingClassifier::observe(TimeMs arrival) {
  std::optional<TimeMs> last = last_;
  last_ = arrival;
  if (!last) {
    return Pace::Normal;
  }
  const double gap = static_cast<double>(arrival - *last);
  const double expected = static_cast<double>(cfg_.expected);
  if (gap < expected * (1.0 - cfg_.tolerance)) {
    return Pace::TooFast;
  }
  if (gap > expected * (1.0 + cfg_.tolerance)) {
    return Pace::TooSlow;
  }
  return Pace::Normal;
}

void TimingCheckNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  Pace pace = classifier_.observe(ctx.now());
  forward(ctx, static_cast<int>(pace), e, e.payload);
}

void DebounceNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  if (cfg_.strategy == DebounceStrategy::Avg && !e.payload.is_number()) {
    forward(ctx, 1, e, Payload{{"error", "malformed"}, {"value", e.payload}});
    return;
  }
  if (!window_) {
    window_ = ctx.start_timer(cfg_.window);
    forward(ctx, 0, e, e.payload);
    return;
  }
  held_.push_back(e);
}

void DebounceNode::on_timer(NodeContext& ctx, TimerId id, int) {
  if (!window_ || *window_ != id) {
    return;
  }
  window_.reset();
  if (held_.empty()) {
    return;
  }
  std::vector<Envelope> held = std::move(held_);
  held_.clear();
  std::optional<Message> out;
  switch (cfg_.strategy) {
    case DebounceStrategy::Last:
      out = held.back().message();
      break;
    case DebounceStrategy::First:
      out = held.front().message();
      break;
    case DebounceStrategy::Avg: {
      double sum = 0;
      for (const auto& h : held) {
        sum += h.payload.get<double>();
      }
      out = Message{held.back().topic, sum / static_cast<double>(held.size()), held.back().corr};
      break;
    }
    case DebounceStrategy::DropExtra:
      break;
  }
  if (out) {
    window_ = ctx.start_timer(cfg_.window);
    ctx.emit(0, std::move(*out));
  }
}

void ActionAuditNode::on_input(NodeContext& ctx, int ingress, const Envelope& e) {
  if (ingress == 0) {
    TimerId t = ctx.start_timer(cfg_.timeout);
    pending_.push_back(Pending{e, t});
    return;
  }
  if (!topic_matches(cfg_.match, e.topic)) {
    ctx.report_error("action-audit: ack topic '" + e.topic + "' does not match '" + cfg_.match + "'");
    return;
  }
  if (pending_.empty()) {
    ctx.report_error("action-audit: ack with no pending trigger ignored");
    return;
  }
  auto it = pending_.begin();
  if (e.corr) {
    auto by_corr = std::find_if(pending_.begin(), pending_.end(),
                                [&](const Pending& p) { return p.trigger.corr == e.corr; });
    if (by_corr != pending_.end()) {
      it = by_corr;
    }
  }
  Pending done = *it;
  pending_.erase(it);
  ctx.cancel_timer(done.timer);
  ctx.emit(0, done.trigger.message());
}

void ActionAuditNode::on_timer(NodeContext& ctx, TimerId id, int) {
  auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Pending& p) { return p.timer == id; });
  if (it == pending_.end()) {
    return;
  }
  Pending failed = *it;
  pending_.erase(it);
  ctx.emit(1, failed.trigger.message());
}

}  // namespace selfheal::nodes
