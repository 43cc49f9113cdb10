#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/core/environment.hpp"
#include "selfheal/core/flow_graph.hpp"
#include "selfheal/core/node.hpp"
#include "selfheal/core/scheduler.hpp"
#include "selfheal/core/timeline.hpp"
#include "selfheal/persistence/store.hpp"

namespace selfheal {

inline constexpr std::string_view kServicePrefix = "service:";

struct Delivery {
  std::string node;
  int ingress = 0;
  bool dropped = false;
};

/// Runs one flow graph on a shared virtual clock.
///
/// Deliveries are synchronous: when a node emits, every wired ingress is
/// invoked (in wire-declaration order) and its own emissions cascade before
/// the emit call returns. Exceptions escaping a node are logged as error
/// entries and never abort the run. Destroying the engine cancels its timers,
/// which is how an instance crash is modelled.
class Engine {
 public:
  struct Options {
    std::string instance = "main";
    std::uint64_t seed = 0;
    std::string address{};
  };

  /// Throws FlowError(Invalid) when validate_graph() reports errors.
  Engine(FlowGraph graph, const NodeRegistry& registry, Scheduler& clock, TimelineLog& log,
         persistence::Store& store, Environment& env, Options options);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Runs every node's start hook in declaration order.
  void start();

  /// Delivers `e` to each ingress wired to (e.source, e.port). Deliveries to
  /// disabled nodes are logged as drops. Throws std::invalid_argument when
  /// the source is unknown.
  std::vector<Delivery> dispatch(const Envelope& e);

  /// Delivers a message arriving from outside the graph (broker, tests).
  Delivery inject(const std::string& node, Message msg, int ingress = 0, const std::string& source = "external");

  void deliver_datagram(std::string_view datagram);

  bool set_flow_enabled(const std::string& flow, bool enabled);
  bool flow_enabled(const std::string& flow) const;
  bool node_enabled(std::string_view node) const;
  std::vector<std::string> flows() const;

  const FlowGraph& graph() const { return graph_; }
  const std::string& instance() const { return options_.instance; }
  TimeMs now() const { return clock_.now(); }

  Node* node(std::string_view id);
  template <typename T>
  T& node_as(std::string_view id) {
    auto* n = dynamic_cast<T*>(node(id));
    if (!n) {
      throw std::invalid_argument("engine: node '" + std::string(id) + "' missing or of another type");
    }
    return *n;
  }

 private:
  class Context;
  struct Slot;
  struct TimerRecord {
    std::size_t slot;
    int tag;
    EventId event;
  };

  void emit_from(std::size_t slot, int port, Message msg);
  void fire_timer(TimerId id);
  TimerId start_timer(std::size_t slot, TimeMs delay, int tag);
  void cancel_timer(TimerId id);
  template <typename F>
  void guarded(std::size_t slot, F&& fn);
  void record(EventKind kind, const std::string& node, std::optional<int> port, std::string topic, std::string value);
  std::optional<std::size_t> index_of(std::string_view id) const;

  FlowGraph graph_;
  Scheduler& clock_;
  TimelineLog& log_;
  persistence::Store& store_;
  Environment& env_;
  Options options_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, bool, std::less<>> flow_enabled_;
  std::map<TimerId, TimerRecord> timers_;
  TimerId next_timer_ = 1;
};

/// A self-contained engine with its own clock, log and store; handy for
/// single-instance runs and tests.
class Runtime {
 public:
  Runtime(FlowGraph graph, const NodeRegistry& registry, std::uint64_t seed = 0, std::string instance = "main");

  Engine& engine() { return *engine_; }
  Scheduler& clock() { return clock_; }
  TimelineLog& log() { return log_; }
  persistence::Store& store() { return store_; }

  void run_until(TimeMs t_end) { clock_.run_until(t_end); }

  /// Schedules an external delivery into `node` at absolute time `at`.
  void inject_at(TimeMs at, const std::string& node, Message msg, int ingress = 0);

  /// Tears the engine down and starts a fresh one over the same store.
  void restart();

 private:
  FlowGraph graph_;
  const NodeRegistry& registry_;
  std::uint64_t seed_;
  std::string instance_;
  Scheduler clock_;
  TimelineLog log_;
  persistence::Store store_;
  Environment env_;
  std::optional<Engine> engine_;
};

/// Runs `graph` alone from t=0 to t_end and returns the timeline.
TimelineLog run_until(const FlowGraph& graph, TimeMs t_end, const NodeRegistry& registry, std::uint64_t seed = 0);

}  // namespace selfheal
