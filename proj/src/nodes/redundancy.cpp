#include "selfheal/nodes/redundancy.hpp"

#include <stdexcept>

namespace selfheal::nodes {

void RedundancyNode::start(NodeContext& ctx) {
  std::string address = cfg_.address.value_or(ctx.address());
  if (address.empty()) {
    throw std::runtime_error("redundancy: instance has no address");
  }
  state_.emplace(cluster::InstanceId::parse(address, ctx.instance()), cfg_.election_timeout, cfg_.controlled_flows);
  ping(ctx);
  ping_timer_ = ctx.start_timer(cfg_.ping_period.value_or(cfg_.election_timeout / 5), kPing);
  // Deferred so that answers to the start-up ping are seen first.
  ctx.start_timer(0, kElect);
}

void RedundancyNode::on_input(NodeContext& ctx, int, const Envelope&) {
  if (state_) {
    elect(ctx);
  }
}

void RedundancyNode::ping(NodeContext& ctx) {
  ctx.broadcast(cluster::encode_ping(state_->self(), state_->epoch(), ctx.now()));
}

void RedundancyNode::elect(NodeContext& ctx) {
  auto t = state_->role_transition();
  if (!t) {
    return;
  }
  Payload role{{"role", std::string(cluster::to_string(t->to))},
               {"epoch", t->epoch},
               {"master", t->master.address},
               {"instance", ctx.instance()}};
  ctx.record_role_change(role);
  ctx.emit(0, Message{"role", role, std::nullopt});
  for (const auto& cmd : t->commands) {
    ctx.emit(1, Message{"flow-control", Payload{{"action", cmd.enable ? "enable" : "disable"}, {"flow", cmd.flow}},
                        std::nullopt});
  }
}

void RedundancyNode::on_timer(NodeContext& ctx, TimerId id, int tag) {
  if (!state_) {
    return;
  }
  switch (tag) {
    case kPing:
      if (ping_timer_ && *ping_timer_ == id) {
        ping(ctx);
        ping_timer_ = ctx.start_timer(cfg_.ping_period.value_or(cfg_.election_timeout / 5), kPing);
      }
      break;
    case kExpire:
      std::erase_if(expiry_, [&](const auto& kv) { return kv.second == id; });
      if (!state_->detect_failures(ctx.now()).empty()) {
        elect(ctx);
      }
      break;
    case kElect:
      elect(ctx);
      break;
    default:
      break;
  }
}

void RedundancyNode::on_datagram(NodeContext& ctx, std::string_view datagram) {
  if (!state_) {
    return;
  }
  cluster::Ping p;
  try {
    p = cluster::decode_ping(datagram);
  } catch (const cluster::ProtocolError& ex) {
    ctx.report_error(std::string("redundancy: ") + ex.what());
    return;
  }
  auto peer = cluster::InstanceId::parse(p.address);
  if (peer == state_->self()) {
    return;
  }
  const bool fresh = state_->on_ping(peer, ctx.now());
  if (auto it = expiry_.find(peer.address); it != expiry_.end()) {
    ctx.cancel_timer(it->second);
  }
  expiry_[peer.address] = ctx.start_timer(cfg_.election_timeout + 1, kExpire);
  if (fresh) {
    ping(ctx);
    elect(ctx);
  }
}

}  // namespace selfheal::nodes
