#include "selfheal/nodes/compensation.hpp"

#include <stdexcept>

#include "selfheal/persistence/store.hpp"

namespace selfheal::nodes {

void CompensateState::append(const Payload& reading) {
  if (history_.size() >= cfg_.history_max_size) {
    history_.pop_front();
  }
  history_.push_back(reading);
}

CompensatedValue CompensateState::accept(const Payload& reading) {
  append(reading);
  confidence_ = 1.0;
  return CompensatedValue{reading, false, confidence_};
}

CompensatedValue CompensateState::substitute() {
  std::vector<Payload> snapshot(history_.begin(), history_.end());
  Payload value = aggregate(cfg_.strategy, snapshot);
  append(value);
  confidence_ *= cfg_.confidence_decay;
  return CompensatedValue{value, true, confidence_};
}

void CompensateNode::restart(NodeContext& ctx) {
  if (timer_) {
    ctx.cancel_timer(*timer_);
  }
  timer_ = ctx.start_timer(state_.config().interval);
}

void CompensateNode::start(NodeContext& ctx) {
  topic_ = ctx.node_id();
  restart(ctx);
}

void CompensateNode::emit_value(NodeContext& ctx, const CompensatedValue& v, const std::optional<std::string>& corr) {
  ctx.emit(0, Message{topic_, v.value, corr});
  ctx.emit(1, Message{topic_,
                      Payload{{"value", v.value}, {"substituted", v.substituted}, {"confidence", v.confidence}},
                      corr});
}

void CompensateNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  topic_ = e.topic;
  auto v = state_.accept(e.payload);
  restart(ctx);
  emit_value(ctx, v, e.corr);
}

void CompensateNode::on_timer(NodeContext& ctx, TimerId id, int) {
  if (!timer_ || *timer_ != id) {
    return;
  }
  timer_.reset();
  if (state_.history().empty()) {
    restart(ctx);
    ctx.emit(2, Message{topic_, error_payload("empty-history", "no reading to compensate from"), std::nullopt});
    return;
  }
  CompensatedValue v;
  try {
    v = state_.substitute();
  } catch (const std::invalid_argument& ex) {
    restart(ctx);
    ctx.emit(2, Message{topic_, error_payload("strategy", ex.what()), std::nullopt});
    return;
  }
  restart(ctx);
  emit_value(ctx, v, std::nullopt);
}

std::optional<Message> checkpoint_init(persistence::Store& store, const std::string& node_id, TimeMs now,
                                       TimeMs time_to_live) {
  auto record = store.load_checkpoint(node_id);
  if (!record) {
    return std::nullopt;
  }
  const TimeMs alive_time = now - record->timestamp;
  if (alive_time > time_to_live) {
    return std::nullopt;
  }
  store.clear_checkpoint(node_id);
  return record->last_message;
}

void CheckpointNode::start(NodeContext& ctx) {
  std::optional<Message> replay;
  try {
    replay = checkpoint_init(ctx.store(), ctx.node_id(), ctx.now(), ttl_);
  } catch (const persistence::StoreError& ex) {
    ctx.report_error(std::string("checkpoint replay: ") + ex.what());
    return;
  }
  if (replay) {
    ctx.emit(0, std::move(*replay));
  }
}

void CheckpointNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  try {
    ctx.store().store_checkpoint(ctx.node_id(), e.message(), ctx.now());
  } catch (const persistence::StoreError& ex) {
    ctx.report_error(std::string("persistence: ") + ex.what());
  }
  ctx.emit(0, e.message());
}

double ScalarKalman::update(double z) {
  if (!initialized_) {
    x_ = z;
    p_ = cfg_.r;
    initialized_ = true;
  }
  p_ += cfg_.q;
  k_ = p_ / (p_ + cfg_.r);
  x_ += k_ * (z - x_);
  p_ *= 1.0 - k_;
  return x_;
}

void KalmanNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  auto z = as_number(e.payload);
  if (!z) {
    forward(ctx, 1, e, Payload{{"error", "malformed"}, {"value", e.payload}});
    return;
  }
  forward(ctx, 0, e, filter_.update(*z));
}

VoteResult vote(std::span<const Payload> values, Quorum quorum) {
  VoteResult result;
  for (const auto& v : values) {
    auto it = std::find_if(result.tally.begin(), result.tally.end(), [&](const auto& t) { return t.first == v; });
    if (it == result.tally.end()) {
      result.tally.emplace_back(v, 1);
    } else {
      ++it->second;
    }
  }
  const std::size_t n = values.size();
  if (n == 0) {
    return result;
  }
  for (const auto& [value, count] : result.tally) {
    bool wins = quorum == Quorum::Majority ? 2 * count > n : count == n;
    if (wins) {
      result.winner = value;
      break;
    }
  }
  return result;
}

void ReplicationVoterNode::decide(NodeContext& ctx, std::span<const Payload> values, const std::string& topic) {
  VoteResult r = vote(values, cfg_.quorum);
  if (r.winner) {
    ctx.emit(0, Message{topic, *r.winner, std::nullopt});
    return;
  }
  Payload tally = Payload::array();
  for (const auto& [value, count] : r.tally) {
    tally.push_back(Payload{{"value", value}, {"count", count}});
  }
  ctx.emit(1, Message{topic, Payload{{"tally", tally}, {"received", values.size()}}, std::nullopt});
}

void ReplicationVoterNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  if (e.payload.is_array()) {
    std::vector<Payload> values(e.payload.begin(), e.payload.end());
    decide(ctx, values, e.topic);
    return;
  }
  if (collected_.empty()) {
    topic_ = e.topic;
    timer_ = ctx.start_timer(cfg_.window);
  }
  collected_.push_back(e.payload);
  if (collected_.size() >= cfg_.expected) {
    if (timer_) {
      ctx.cancel_timer(*timer_);
      timer_.reset();
    }
    auto values = std::move(collected_);
    collected_.clear();
    decide(ctx, values, topic_);
  }
}

void ReplicationVoterNode::on_timer(NodeContext& ctx, TimerId id, int) {
  if (!timer_ || *timer_ != id) {
    return;
  }
  timer_.reset();
  auto values = std::move(collected_);
  collected_.clear();
  decide(ctx, values, topic_.empty() ? ctx.node_id() : topic_);
}

}  // namespace selfheal::nodes
