#include "selfheal/nodes/balancing.hpp"

#include <stdexcept>

#include "selfheal/nodes/common.hpp"

namespace selfheal::nodes {

Balancer::Balancer(BalancingConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  if (cfg_.outputs < 1) {
    throw std::invalid_argument("balancer needs at least one output");
  }
  if (cfg_.strategy == BalanceStrategy::WeightedRoundRobin) {
    if (cfg_.weights.size() != cfg_.outputs) {
      throw std::invalid_argument("balancer: one weight per output required");
    }
    for (std::size_t i = 0; i < cfg_.weights.size(); ++i) {
      if (cfg_.weights[i] == 0) {
        throw std::invalid_argument("balancer: weights must be positive");
      }
      cycle_.insert(cycle_.end(), cfg_.weights[i], i);
    }
  } else {
    for (std::size_t i = 0; i < cfg_.outputs; ++i) {
      cycle_.push_back(i);
    }
  }
}

std::size_t Balancer::next() {
  if (cfg_.strategy == BalanceStrategy::Random) {
    return static_cast<std::size_t>(rng_.below(cfg_.outputs));
  }
  std::size_t out = cycle_[cursor_];
  cursor_ = (cursor_ + 1) % cycle_.size();
  return out;
}

void BalancingNode::start(NodeContext& ctx) { balancer_.emplace(cfg_, seed_.value_or(ctx.seed())); }

void BalancingNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  if (!balancer_) {
    balancer_.emplace(cfg_, seed_.value_or(ctx.seed()));
  }
  forward(ctx, static_cast<int>(balancer_->next()), e, e.payload);
}

void FlowControlNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  const auto& p = e.payload;
  if (!p.is_object() || !p.contains("action") || !p.contains("flow") || !p["action"].is_string() ||
      !p["flow"].is_string()) {
    forward(ctx, 1, e, error_payload("malformed", "expected {\"action\", \"flow\"}"));
    return;
  }
  const std::string action = p["action"].get<std::string>();
  const std::string flow = p["flow"].get<std::string>();
  if (action != "enable" && action != "disable") {
    forward(ctx, 1, e, error_payload("malformed", "action must be enable or disable"));
    return;
  }
  const bool enable = action == "enable";
  if (!ctx.set_flow_enabled(flow, enable)) {
    forward(ctx, 1, e, Payload{{"error", "unknown-flow"}, {"flow", flow}});
    return;
  }
  forward(ctx, 0, e, Payload{{"action", action}, {"flow", flow}, {"enabled", enable}});
}

void RbeNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  if (auto out = rbe_.process(e)) {
    ctx.emit(0, out->message());
  }
}

}  // namespace selfheal::nodes
