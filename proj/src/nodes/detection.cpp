#include "selfheal/nodes/detection.hpp"

#include <cmath>

#include "selfheal/nodes/common.hpp"

namespace selfheal::nodes {

void ThresholdCheckNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  auto reading = as_number(e.payload);
  if (!reading) {
    forward(ctx, 1, e, Payload{{"error", "malformed"}, {"value", e.payload}});
    return;
  }
  if (within_threshold(*reading, cfg_)) {
    forward(ctx, 0, e, e.payload);
  } else {
    forward(ctx, 1, e, Payload{{"error", "out-of-range"}, {"value", e.payload}, {"low", cfg_.low}, {"high", cfg_.high}});
  }
}

std::string_view to_string(Anomaly a) {
  switch (a) {
    case Anomaly::None: return "none";
    case Anomaly::StuckAt: return "stuck-at";
    case Anomaly::MaxChange: return "max-change";
    case Anomaly::MinChange: return "min-change";
  }
  return "?";
}

Anomaly ReadingsWatcher::observe(double reading) {
  if (!previous_) {
    previous_ = reading;
    run_length_ = 1;
    return Anomaly::None;
  }
  const double delta = std::abs(reading - *previous_);
  run_length_ = reading == *previous_ ? run_length_ + 1 : 1;
  previous_ = reading;
  if (run_length_ >= cfg_.stuck_count) {
    return Anomaly::StuckAt;
  }
  if (cfg_.max_delta && delta > *cfg_.max_delta) {
    return Anomaly::MaxChange;
  }
  if (delta < cfg_.min_delta) {
    return Anomaly::MinChange;
  }
  return Anomaly::None;
}

void ReadingsWatcherNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  auto reading = as_number(e.payload);
  if (!reading) {
    forward(ctx, 2, e, Payload{{"error", "malformed"}, {"value", e.payload}});
    return;
  }
  auto prev = watcher_.previous();
  Anomaly a = watcher_.observe(*reading);
  if (a == Anomaly::None) {
    forward(ctx, 0, e, e.payload);
    return;
  }
  Payload detail{{"anomaly", std::string(to_string(a))}, {"value", *reading}};
  if (prev) {
    detail["previous"] = *prev;
  }
  forward(ctx, 1, e, std::move(detail));
}

void ResourceMonitorNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  if (!e.payload.is_object() || !e.payload.contains(cfg_.metric)) {
    forward(ctx, 2, e, Payload{{"error", "missing-metric"}, {"metric", cfg_.metric}});
    return;
  }
  auto value = as_number(e.payload[cfg_.metric]);
  if (!value) {
    forward(ctx, 2, e, Payload{{"error", "malformed"}, {"metric", cfg_.metric}});
    return;
  }
  auto alert = [&](const char* bound, double threshold) {
    forward(ctx, 1, e,
            Payload{{"metric", cfg_.metric}, {"value", *value}, {"bound", bound}, {"threshold", threshold}});
  };
  if (cfg_.near_min && *value <= *cfg_.near_min) {
    alert("nearMin", *cfg_.near_min);
  } else if (cfg_.near_max && *value >= *cfg_.near_max) {
    alert("nearMax", *cfg_.near_max);
  } else {
    forward(ctx, 0, e, e.payload);
  }
}

void HeartbeatNode::restart(NodeContext& ctx) {
  if (timer_) {
    ctx.cancel_timer(*timer_);
  }
  timer_ = ctx.start_timer(cfg_.timeout);
}

void HeartbeatNode::start(NodeContext& ctx) {
  topic_ = ctx.node_id();
  restart(ctx);
}

void HeartbeatNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  restart(ctx);
  topic_ = e.topic;
  if (cfg_.mode == HeartbeatMode::Active) {
    ctx.emit(0, Message{e.topic, cfg_.ping, e.corr});
  }
  ctx.emit(1, Message{e.topic, cfg_.ok, e.corr});
}

void HeartbeatNode::on_timer(NodeContext& ctx, TimerId id, int) {
  if (!timer_ || *timer_ != id) {
    return;
  }
  timer_.reset();
  restart(ctx);
  ctx.emit(2, Message{topic_, cfg_.error, std::nullopt});
}

}  // namespace selfheal::nodes
