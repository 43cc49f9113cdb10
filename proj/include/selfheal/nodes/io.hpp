#pragma once

#include <optional>
#include <string>

#include "selfheal/core/node.hpp"

namespace selfheal::nodes {

/// Broker subscription endpoint. The hosting world delivers matching
/// publications on ingress 0; they leave unchanged on egress 0.
class MqttInNode final : public Node {
 public:
  explicit MqttInNode(std::string topic) : topic_(std::move(topic)) {}
  const std::string& topic() const { return topic_; }
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  std::string topic_;
};

/// Publishes every input to the broker, under `topic` when configured.
class MqttOutNode final : public Node {
 public:
  explicit MqttOutNode(std::optional<std::string> topic) : topic_(std::move(topic)) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  std::optional<std::string> topic_;
};

/// Sends every input to an external service. Egress 0 carries
/// {"service", "status"} with 200, 503 (service down) or 404 (unknown).
class HttpOutNode final : public Node {
 public:
  HttpOutNode(std::string service, std::optional<std::string> topic)
      : service_(std::move(service)), topic_(std::move(topic)) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  std::string service_;
  std::optional<std::string> topic_;
};

/// Emits `payload` every `period` ms from start; inputs are forwarded too.
class InjectNode final : public Node {
 public:
  InjectNode(TimeMs period, Payload payload, std::string topic)
      : period_(period), payload_(std::move(payload)), topic_(std::move(topic)) {}
  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

 private:
  TimeMs period_;
  Payload payload_;
  std::string topic_;
};

/// Sink; deliveries are visible in the timeline.
class DebugNode final : public Node {
 public:
  void on_input(NodeContext&, int, const Envelope&) override {}
};

/// Picks one field out of a record payload. Missing field or non-record
/// payload goes to egress 1.
class ExtractNode final : public Node {
 public:
  explicit ExtractNode(std::string field) : field_(std::move(field)) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  std::string field_;
};

/// Routes to egress 0 when payload[property] (the whole payload when
/// property is empty) equals `equals`, else to egress 1.
class SwitchNode final : public Node {
 public:
  SwitchNode(std::string property, Payload equals) : property_(std::move(property)), equals_(std::move(equals)) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  std::string property_;
  Payload equals_;
};

}  // namespace selfheal::nodes
