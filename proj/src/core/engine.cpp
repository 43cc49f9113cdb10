#include "selfheal/core/engine.hpp"

#include <stdexcept>

#include "selfheal/core/random.hpp"

namespace selfheal {

struct Engine::Slot {
  NodeDef def;
  const NodeSpec* spec = nullptr;
  std::unique_ptr<Node> node;
  int egress = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::pair<std::size_t, int>>> routes;  // per egress: (target slot, ingress)
  std::unique_ptr<Context> ctx;
};

class Engine::Context final : public NodeContext {
 public:
  Context(Engine& engine, std::size_t slot) : engine_(engine), slot_(slot) {}

  TimeMs now() const override { return engine_.clock_.now(); }
  const std::string& node_id() const override { return engine_.slots_[slot_]->def.id; }
  const std::string& instance() const override { return engine_.options_.instance; }
  const std::string& address() const override { return engine_.options_.address; }
  void emit(int port, Message msg) override { engine_.emit_from(slot_, port, std::move(msg)); }
  TimerId start_timer(TimeMs delay, int tag) override { return engine_.start_timer(slot_, delay, tag); }
  void cancel_timer(TimerId id) override { engine_.cancel_timer(id); }
  bool set_flow_enabled(const std::string& flow, bool enabled) override {
    return engine_.set_flow_enabled(flow, enabled);
  }
  persistence::Store& store() override { return engine_.store_; }
  Environment& environment() override { return engine_.env_; }

  RequestStatus request_service(const std::string& service, const Message& msg) override {
    Envelope e{now(), msg.topic, msg.payload, node_id(), 0, msg.corr};
    RequestStatus status = engine_.env_.request(instance(), service, e);
    EventKind kind = status == RequestStatus::Delivered ? EventKind::Deliver : EventKind::Drop;
    engine_.record(kind, std::string(kServicePrefix) + service, 0, msg.topic, compact(msg.payload));
    return status;
  }
  void publish(const Message& msg) override {
    engine_.env_.publish(instance(), Envelope{now(), msg.topic, msg.payload, node_id(), 0, msg.corr});
  }
  void broadcast(const std::string& datagram) override { engine_.env_.broadcast(instance(), datagram); }

  std::uint64_t seed() const override { return engine_.slots_[slot_]->seed; }
  void report_error(std::string_view what) override {
    engine_.record(EventKind::Error, node_id(), std::nullopt, "", compact(Payload{{"error", std::string(what)}}));
  }
  void record_role_change(const Payload& detail) override {
    engine_.record(EventKind::RoleChange, node_id(), std::nullopt, "role", compact(detail));
  }

 private:
  Engine& engine_;
  std::size_t slot_;
};

Engine::Engine(FlowGraph graph, const NodeRegistry& registry, Scheduler& clock, TimelineLog& log,
               persistence::Store& store, Environment& env, Options options)
    : graph_(std::move(graph)), clock_(clock), log_(log), store_(store), env_(env), options_(std::move(options)) {
  auto diagnostics = validate_graph(graph_, registry);
  if (!diagnostics.empty()) {
    std::string msg = "engine: flow is invalid";
    for (const auto& d : diagnostics) {
      msg += "\n  " + to_string(d);
    }
    throw FlowError(FlowError::Code::Invalid, msg);
  }
  for (auto& def : graph_.nodes) {
    auto slot = std::make_unique<Slot>();
    slot->spec = registry.find(def.kind);
    def.config = with_defaults(*slot->spec, def.config);
    slot->def = def;
    slot->egress = slot->spec->egress_count(def.config);
    slot->routes.resize(static_cast<std::size_t>(slot->egress));
    slot->seed = derive_seed(options_.seed, def.id);
    slot->ctx = std::make_unique<Context>(*this, slots_.size());
    index_.emplace(def.id, slots_.size());
    flow_enabled_.emplace(def.flow, true);
    slots_.push_back(std::move(slot));
  }
  for (const auto& w : graph_.wires) {
    auto& from = *slots_[index_.at(w.from.node)];
    from.routes[static_cast<std::size_t>(w.from.port)].emplace_back(index_.at(w.to.node), w.to.port);
  }
  for (auto& slot : slots_) {
    slot->node = slot->spec->make(slot->def);
    if (slot->spec->initially_disabled_flows) {
      for (const auto& flow : slot->spec->initially_disabled_flows(slot->def.config)) {
        set_flow_enabled(flow, false);
      }
    }
  }
}

Engine::~Engine() {
  for (const auto& [id, rec] : timers_) {
    clock_.cancel(rec.event);
  }
}

void Engine::start() {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    guarded(i, [&] { slots_[i]->node->start(*slots_[i]->ctx); });
  }
}

void Engine::record(EventKind kind, const std::string& node, std::optional<int> port, std::string topic,
                    std::string value) {
  log_.append(LogEntry{clock_.now(), options_.instance, kind, node, port, std::move(topic), std::move(value)});
}

template <typename F>
void Engine::guarded(std::size_t slot, F&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    slots_[slot]->ctx->report_error(e.what());
  }
}

std::optional<std::size_t> Engine::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

void Engine::emit_from(std::size_t slot, int port, Message msg) {
  const auto& s = *slots_[slot];
  if (port < 0 || port >= s.egress) {
    throw std::out_of_range("node '" + s.def.id + "' emitted on egress " + std::to_string(port) + " of " +
                            std::to_string(s.egress));
  }
  Envelope e{clock_.now(), std::move(msg.topic), std::move(msg.payload), s.def.id, port, std::move(msg.corr)};
  record(EventKind::Emit, e.source, port, e.topic, compact(e.payload));
  dispatch(e);
}

std::vector<Delivery> Engine::dispatch(const Envelope& e) {
  auto src = index_of(e.source);
  if (!src) {
    throw std::invalid_argument("dispatch: unknown source node '" + e.source + "'");
  }
  const auto& routes = slots_[*src]->routes;
  if (e.port < 0 || static_cast<std::size_t>(e.port) >= routes.size()) {
    throw std::invalid_argument("dispatch: egress " + std::to_string(e.port) + " out of range for '" + e.source + "'");
  }
  std::vector<Delivery> out;
  // Copy: a cascade may not touch routes, but keep iteration independent of it.
  const auto targets = routes[static_cast<std::size_t>(e.port)];
  for (const auto& [target, ingress] : targets) {
    const auto& t = *slots_[target];
    const std::string value = compact(e.payload);
    if (!node_enabled(t.def.id)) {
      record(EventKind::Drop, t.def.id, ingress, e.topic, value);
      out.push_back(Delivery{t.def.id, ingress, true});
      continue;
    }
    record(EventKind::Deliver, t.def.id, ingress, e.topic, value);
    out.push_back(Delivery{t.def.id, ingress, false});
    guarded(target, [&, target = target, ingress = ingress] {
      slots_[target]->node->on_input(*slots_[target]->ctx, ingress, e);
    });
  }
  return out;
}

Delivery Engine::inject(const std::string& node, Message msg, int ingress, const std::string& source) {
  auto idx = index_of(node);
  if (!idx) {
    throw std::invalid_argument("inject: unknown node '" + node + "'");
  }
  auto& s = *slots_[*idx];
  if (ingress < 0 || ingress >= s.spec->ingress) {
    throw std::invalid_argument("inject: node '" + node + "' has no ingress " + std::to_string(ingress));
  }
  Envelope e{clock_.now(), std::move(msg.topic), std::move(msg.payload), source, 0, std::move(msg.corr)};
  if (!node_enabled(node)) {
    record(EventKind::Drop, node, ingress, e.topic, compact(e.payload));
    return Delivery{node, ingress, true};
  }
  record(EventKind::Deliver, node, ingress, e.topic, compact(e.payload));
  guarded(*idx, [&] { s.node->on_input(*s.ctx, ingress, e); });
  return Delivery{node, ingress, false};
}

void Engine::deliver_datagram(std::string_view datagram) {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    guarded(i, [&] { slots_[i]->node->on_datagram(*slots_[i]->ctx, datagram); });
  }
}

TimerId Engine::start_timer(std::size_t slot, TimeMs delay, int tag) {
  if (delay < 0) {
    throw std::invalid_argument("timer delay must be non-negative");
  }
  const TimerId id = next_timer_++;
  EventId ev = clock_.schedule_after(delay, [this, id] { fire_timer(id); });
  timers_.emplace(id, TimerRecord{slot, tag, ev});
  return id;
}

void Engine::cancel_timer(TimerId id) {
  auto it = timers_.find(id);
  if (it == timers_.end()) {
    return;
  }
  clock_.cancel(it->second.event);
  timers_.erase(it);
}

void Engine::fire_timer(TimerId id) {
  auto it = timers_.find(id);
  if (it == timers_.end()) {
    return;
  }
  TimerRecord rec = it->second;
  timers_.erase(it);
  auto& s = *slots_[rec.slot];
  record(EventKind::Timer, s.def.id, std::nullopt, "", std::to_string(rec.tag));
  guarded(rec.slot, [&] { s.node->on_timer(*s.ctx, id, rec.tag); });
}

bool Engine::set_flow_enabled(const std::string& flow, bool enabled) {
  auto it = flow_enabled_.find(flow);
  if (it == flow_enabled_.end()) {
    return false;
  }
  it->second = enabled;
  return true;
}

bool Engine::flow_enabled(const std::string& flow) const {
  auto it = flow_enabled_.find(flow);
  return it != flow_enabled_.end() && it->second;
}

bool Engine::node_enabled(std::string_view node) const {
  auto idx = index_of(node);
  if (!idx) {
    return false;
  }
  const auto& def = slots_[*idx]->def;
  return def.enabled && flow_enabled(def.flow);
}

std::vector<std::string> Engine::flows() const {
  std::vector<std::string> out;
  for (const auto& [flow, enabled] : flow_enabled_) {
    out.push_back(flow);
  }
  return out;
}

Node* Engine::node(std::string_view id) {
  auto idx = index_of(id);
  return idx ? slots_[*idx]->node.get() : nullptr;
}

Runtime::Runtime(FlowGraph graph, const NodeRegistry& registry, std::uint64_t seed, std::string instance)
    : graph_(std::move(graph)), registry_(registry), seed_(seed), instance_(std::move(instance)) {
  engine_.emplace(graph_, registry_, clock_, log_, store_, env_, Engine::Options{instance_, seed_});
  engine_->start();
}

void Runtime::inject_at(TimeMs at, const std::string& node, Message msg, int ingress) {
  clock_.schedule_at(at, [this, node, msg = std::move(msg), ingress]() mutable {
    engine_->inject(node, std::move(msg), ingress);
  });
}

void Runtime::restart() {
  engine_.reset();
  engine_.emplace(graph_, registry_, clock_, log_, store_, env_, Engine::Options{instance_, seed_});
  engine_->start();
}

TimelineLog run_until(const FlowGraph& graph, TimeMs t_end, const NodeRegistry& registry, std::uint64_t seed) {
  if (t_end < 0) {
    throw std::invalid_argument("run_until: t_end must be non-negative");
  }
  Runtime rt(graph, registry, seed);
  rt.run_until(t_end);
  return rt.log();
}

}  // namespace selfheal
