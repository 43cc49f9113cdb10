#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/cluster/cluster.hpp"
#include "selfheal/core/node.hpp"

namespace selfheal::nodes {

struct RedundancyConfig {
  TimeMs election_timeout = cluster::kDefaultElectionTimeout;
  std::vector<std::string> controlled_flows;
  /// Defaults to election_timeout / 5.
  std::optional<TimeMs> ping_period;
  /// Defaults to the hosting instance's address.
  std::optional<std::string> address;
};

/// Active-standby coordination between runtime instances.
///
/// Broadcasts a ping at start and every ping period. A ping from an unknown
/// (or previously dead) peer is answered with an immediate ping and triggers
/// an election; each peer's silence deadline is lastSeen + timeout + 1, at
/// which point it is declared dead and another election runs. Role changes
/// emit a role record on egress 0 and one flow command per controlled flow on
/// egress 1. The controlled flows start disabled.
class RedundancyNode final : public Node {
 public:
  explicit RedundancyNode(RedundancyConfig cfg) : cfg_(std::move(cfg)) {}

  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;
  void on_datagram(NodeContext& ctx, std::string_view datagram) override;

  const cluster::ClusterState* state() const { return state_ ? &*state_ : nullptr; }

 private:
  enum Tag { kPing = 1, kExpire = 2, kElect = 3 };

  void ping(NodeContext& ctx);
  void elect(NodeContext& ctx);

  RedundancyConfig cfg_;
  std::optional<cluster::ClusterState> state_;
  std::optional<TimerId> ping_timer_;
  std::map<std::string, TimerId> expiry_;
};

}  // namespace selfheal::nodes
