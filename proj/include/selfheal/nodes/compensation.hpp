#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfheal/core/node.hpp"
#include "selfheal/nodes/common.hpp"

namespace selfheal::nodes {

struct CompensateConfig {
  std::size_t history_max_size = 10;
  TimeMs interval = 0;
  Aggregate strategy = Aggregate::Last;
  double confidence_decay = 0.9;
};

struct CompensatedValue {
  Payload value;
  bool substituted = false;
  double confidence = 1.0;
};

/// Bounded reading history plus the confidence bookkeeping of the compensate
/// operator. Timer handling lives in CompensateNode.
class CompensateState {
 public:
  explicit CompensateState(CompensateConfig cfg) : cfg_(cfg) {}

  /// A real reading: appended (evicting the oldest at capacity), confidence reset to 1.
  CompensatedValue accept(const Payload& reading);

  /// Computes a substitute from the history and feeds it back in as an
  /// input, so it becomes part of the history used by the next substitute.
  /// Throws std::invalid_argument when the history is empty.
  CompensatedValue substitute();

  const std::deque<Payload>& history() const { return history_; }
  double confidence() const { return confidence_; }
  const CompensateConfig& config() const { return cfg_; }

 private:
  void append(const Payload& reading);

  CompensateConfig cfg_;
  std::deque<Payload> history_;
  double confidence_ = 1.0;
};

/// Egress 0: readings and substitutes; egress 1: {value, substituted,
/// confidence} for every emission; egress 2: errors. The silence timer starts
/// when the node starts and is restarted by every input or substitute.
class CompensateNode final : public Node {
 public:
  explicit CompensateNode(CompensateConfig cfg) : state_(cfg) {}

  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

  const CompensateState& state() const { return state_; }

 private:
  void restart(NodeContext& ctx);
  void emit_value(NodeContext& ctx, const CompensatedValue& v, const std::optional<std::string>& corr);

  CompensateState state_;
  std::optional<TimerId> timer_;
  std::string topic_;
};

/// Stores the last input in the persistent store and forwards it. At start
/// the stored message is replayed once if it is no older than timeToLive.
class CheckpointNode final : public Node {
 public:
  explicit CheckpointNode(TimeMs time_to_live) : ttl_(time_to_live) {}

  void start(NodeContext& ctx) override;
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

 private:
  TimeMs ttl_;
};

/// Replay decision at startup: returns the message to replay, clearing the
/// slot, or nothing.
std::optional<Message> checkpoint_init(persistence::Store& store, const std::string& node_id, TimeMs now,
                                       TimeMs time_to_live);

struct KalmanConfig {
  double q = 0.01;  // process variance
  double r = 1.0;   // measurement variance
};

/// One-dimensional constant-state Kalman filter. The first measurement
/// initializes the estimate to itself with variance r, then is filtered like
/// any other measurement.
class ScalarKalman {
 public:
  explicit ScalarKalman(KalmanConfig cfg) : cfg_(cfg) {}

  double update(double z);

  bool initialized() const { return initialized_; }
  double estimate() const { return x_; }
  double variance() const { return p_; }
  double last_gain() const { return k_; }

 private:
  KalmanConfig cfg_;
  bool initialized_ = false;
  double x_ = 0;
  double p_ = 0;
  double k_ = 0;
};

class KalmanNode final : public Node {
 public:
  explicit KalmanNode(KalmanConfig cfg) : filter_(cfg) {}
  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;

  const ScalarKalman& filter() const { return filter_; }

 private:
  ScalarKalman filter_;
};

enum class Quorum { Majority, Unanimity };

struct VoteResult {
  std::optional<Payload> winner;
  /// (value, count) in order of first appearance.
  std::vector<std::pair<Payload, std::size_t>> tally;
};

/// Majority needs strictly more than half of the submitted values; unanimity
/// needs all of them. Ties and empty input give no winner.
VoteResult vote(std::span<const Payload> values, Quorum quorum);

struct VoterConfig {
  std::size_t expected = 3;
  Quorum quorum = Quorum::Majority;
  TimeMs window = 1000;
};

/// Collects values until `expected` have arrived or the window (opened by the
/// first value) closes, then votes. An array payload is voted on at once.
class ReplicationVoterNode final : public Node {
 public:
  explicit ReplicationVoterNode(VoterConfig cfg) : cfg_(cfg) {}

  void on_input(NodeContext& ctx, int ingress, const Envelope& e) override;
  void on_timer(NodeContext& ctx, TimerId id, int tag) override;

 private:
  void decide(NodeContext& ctx, std::span<const Payload> values, const std::string& topic);

  VoterConfig cfg_;
  std::vector<Payload> collected_;
  std::string topic_;
  std::optional<TimerId> timer_;
};

}  // namespace selfheal::nodes
