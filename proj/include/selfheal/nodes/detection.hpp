#pragma once

#include <optional>
#include <string>

#include "selfheal/core/node.hpp"

namespace selfheal::nodes {

struct ThresholdConfig {
  double low = 0;
  double high = 0;
};

/// Inclusive range check: low <= reading <= high.
constexpr bool within_threshold(double reading, const ThresholdConfig& cfg) {
  return cfg.low <= reading && reading <= cfg.high;
}

/// Egress 0 carries in-range readings, egress 1 an error record for
/// out-of-range ("out-of-range") or non-numeric ("malformed") input.
class ThresholdCheckNode final : public Node {
 public:
  explicit ThresholdCheckNode(ThresholdConfig cfg) : cfg_(cfg) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  ThresholdConfig cfg_;
};

struct WatcherConfig {
  double min_delta = 0;
  std::optional<double> max_delta;
  int stuck_count = 2;
};

enum class Anomaly { None, StuckAt, MaxChange, MinChange };

std::string_view to_string(Anomaly a);

/// Sequential plausibility checks over consecutive readings.
class ReadingsWatcher {
 public:
  explicit ReadingsWatcher(WatcherConfig cfg) : cfg_(cfg) {}

  /// Classifies `reading` against its predecessor; the first reading is
  /// always accepted. Stuck-at takes precedence, then max-change, then
  /// min-change.
  Anomaly observe(double reading);

  std::optional<double> previous() const { return previous_; }

 private:
  WatcherConfig cfg_;
  std::optional<double> previous_;
  int run_length_ = 0;
};

class ReadingsWatcherNode final : public Node {
 public:
  explicit ReadingsWatcherNode(WatcherConfig cfg) : watcher_(cfg) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  ReadingsWatcher watcher_;
};

struct ResourceMonitorConfig {
  std::string metric;
  std::optional<double> near_min;
  std::optional<double> near_max;
};

/// Egresses: ok, alert, error.
class ResourceMonitorNode final : public Node {
 public:
  explicit ResourceMonitorNode(ResourceMonitorConfig cfg) : cfg_(std::move(cfg)) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  ResourceMonitorConfig cfg_;
};

enum class HeartbeatMode { Passive, Active };

struct HeartbeatConfig {
  Payload ping = "ping";
  Payload ok = "ok";
  Payload error = "error";
  HeartbeatMode mode = HeartbeatMode::Passive;
  TimeMs timeout = 0;
};

/// Liveness probe. Any input restarts the timeout and emits ok (plus ping in
/// active mode); each expiry emits error and restarts the timer, so errors
/// repeat once per timeout for as long as the silence lasts. The timer runs
/// from node start.
class HeartbeatNode final : public Node {
 public:
  explicit HeartbeatNode(HeartbeatConfig cfg) : cfg_(std::move(cfg)) {}

  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

 private:
  void restart(NodeContext& ctx);

  HeartbeatConfig cfg_;
  std::optional<TimerId> timer_;
  std::string topic_;
};

}  // namespace selfheal::nodes
