#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfheal/core/envelope.hpp"
#include "selfheal/core/environment.hpp"

namespace selfheal {

namespace persistence {
class Store;
}

struct NodeDef;

using TimerId = std::uint64_t;

/// Engine services available to a node while it runs.
class NodeContext {
 public:
  virtual ~NodeContext() = default;

  virtual TimeMs now() const = 0;
  virtual const std::string& node_id() const = 0;
  virtual const std::string& instance() const = 0;
  /// Network address of the hosting instance; empty when unknown.
  virtual const std::string& address() const = 0;

  /// Emits on egress `port`; downstream deliveries complete before this returns.
  virtual void emit(int port, Message msg) = 0;

  virtual TimerId start_timer(TimeMs delay, int tag = 0) = 0;
  virtual void cancel_timer(TimerId id) = 0;

  /// Returns false when no node belongs to `flow`.
  virtual bool set_flow_enabled(const std::string& flow, bool enabled) = 0;

  virtual persistence::Store& store() = 0;
  virtual Environment& environment() = 0;

  /// Sends `msg` to an external service; the outcome is logged against
  /// "service:<name>".
  virtual RequestStatus request_service(const std::string& service, const Message& msg) = 0;
  virtual void publish(const Message& msg) = 0;
  virtual void broadcast(const std::string& datagram) = 0;

  /// Per-node seed derived from the run seed and the node id.
  virtual std::uint64_t seed() const = 0;

  /// Records an operator error in the timeline without emitting.
  virtual void report_error(std::string_view what) = 0;
  virtual void record_role_change(const Payload& detail) = 0;
};

class Node {
 public:
  virtual ~Node() = default;

  virtual void start(NodeContext& /*ctx*/) {}
  virtual void on_input(NodeContext& ctx, int ingress, const Envelope& e) = 0;
  virtual void on_timer(NodeContext& /*ctx*/, TimerId /*id*/, int /*tag*/) {}
  virtual void on_datagram(NodeContext& /*ctx*/, std::string_view /*datagram*/) {}
};

enum class ConfigType {
  Number,
  Integer,
  Duration,  // integer milliseconds
  String,
  Bool,
  Any,
  NumberList,
  IntegerList,
  StringList,
};

struct ConfigField {
  std::string key;
  ConfigType type = ConfigType::Number;
  /// Absent means the key is required, except for optional fields.
  std::optional<Payload> default_value;
  bool optional = false;
};

/// Static description of one node kind: ports, configuration schema and a
/// factory.
struct NodeSpec {
  std::string kind;
  int ingress = 1;
  std::vector<std::string> egress_names{};
  /// Overrides egress_names.size() for kinds whose fan-out is configured.
  std::function<int(const Payload& config)> dynamic_egress{};
  std::vector<ConfigField> config{};
  /// Appends one message per violated configuration invariant.
  std::function<void(const Payload& config, std::vector<std::string>& problems)> check{};
  std::function<std::unique_ptr<Node>(const NodeDef& def)> make{};
  /// Flow-groups the engine must disable before any node starts.
  std::function<std::vector<std::string>(const Payload& config)> initially_disabled_flows{};

  int egress_count(const Payload& config) const;
  /// Name used in reports, e.g. "tooFast"; falls back to the index.
  std::string egress_name(const Payload& config, int port) const;
};

class NodeRegistry {
 public:
  void add(NodeSpec spec);
  const NodeSpec* find(std::string_view kind) const;
  std::vector<std::string> kinds() const;

 private:
  std::map<std::string, NodeSpec, std::less<>> specs_;
};

}  // namespace selfheal
