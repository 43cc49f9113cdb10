#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selfheal/core/node.hpp"
#include "selfheal/core/random.hpp"
#include "selfheal/core/rbe.hpp"

namespace selfheal::nodes {

enum class BalanceStrategy { RoundRobin, WeightedRoundRobin, Random };

struct BalancingConfig {
  std::size_t outputs = 2;
  BalanceStrategy strategy = BalanceStrategy::RoundRobin;
  std::vector<std::uint32_t> weights;
};

/// Picks an egress per message. Weighted round robin walks the expanded cycle
/// [0 x w0, 1 x w1, ...]; random draws from the seeded generator.
class Balancer {
 public:
  Balancer(BalancingConfig cfg, std::uint64_t seed);

  std::size_t next();

 private:
  BalancingConfig cfg_;
  std::vector<std::size_t> cycle_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

class BalancingNode final : public Node {
 public:
  BalancingNode(BalancingConfig cfg, std::optional<std::uint64_t> seed) : cfg_(std::move(cfg)), seed_(seed) {}

  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  BalancingConfig cfg_;
  std::optional<std::uint64_t> seed_;
  std::optional<Balancer> balancer_;
};

/// Applies {"action": "enable"|"disable", "flow": id} commands. Egress 0
/// acknowledges, egress 1 reports malformed commands and unknown flow-groups.
class FlowControlNode final : public Node {
 public:
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
};

class RbeNode final : public Node {
 public:
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  ReportByException rbe_;
};

}  // namespace selfheal::nodes
