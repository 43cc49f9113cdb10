#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selfheal/core/node.hpp"

namespace selfheal::nodes {

/// What a probe saw: id -> endpoint.
using Inventory = std::map<std::string, std::string>;

struct InventoryDiff {
  std::vector<std::string> appeared;
  std::vector<std::string> vanished;

  bool empty() const { return appeared.empty() && vanished.empty(); }
};

/// Ids present now but not before, and vice versa, each sorted.
InventoryDiff diff_inventory(const Inventory& before, const Inventory& now);

/// Base for periodic probes: probes every `period` from start and on any
/// input, emitting one event per change.
class ProbeNode : public Node {
 public:
  explicit ProbeNode(TimeMs period) : period_(period) {}

  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

 protected:
  virtual Inventory probe(NodeContext& ctx) = 0;
  virtual std::string_view kind() const = 0;
  virtual std::string_view appeared_event() const = 0;
  virtual std::string_view vanished_event() const = 0;

 private:
  void scan(NodeContext& ctx);

  TimeMs period_;
  std::optional<TimerId> timer_;
  Inventory last_;
};

/// Services from the environment whose port is in the watched list.
class HttpAwareNode final : public ProbeNode {
 public:
  HttpAwareNode(std::set<int> ports, TimeMs period) : ProbeNode(period), ports_(std::move(ports)) {}

 protected:
  Inventory probe(NodeContext& ctx) override;
  std::string_view kind() const override { return "service"; }
  std::string_view appeared_event() const override { return "appeared"; }
  std::string_view vanished_event() const override { return "disappeared"; }

 private:
  std::set<int> ports_;
};

class NetworkAwareNode final : public ProbeNode {
 public:
  explicit NetworkAwareNode(TimeMs period) : ProbeNode(period) {}

 protected:
  Inventory probe(NodeContext& ctx) override;
  std::string_view kind() const override { return "host"; }
  std::string_view appeared_event() const override { return "joined"; }
  std::string_view vanished_event() const override { return "left"; }
};

/// Maintains the persistent device registry from discovery and heartbeat
/// events: {"event": joined|appeared|left|disappeared|heartbeat-error,
/// "id": str, "kind"?: str, "endpoint"?: str}. Emits the updated entry.
class DeviceRegistryNode final : public Node {
 public:
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
};

}  // namespace selfheal::nodes
