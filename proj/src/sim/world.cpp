#include "selfheal/sim/world.hpp"

#include <algorithm>
#include <cmath>

#include "selfheal/nodes/common.hpp"

namespace selfheal::sim {

struct World::Instance {
  InstanceSpec spec;
  FlowGraph graph;
  std::uint64_t seed = 0;
  persistence::Store store;
  std::optional<Engine> engine;
  TimeMs delay = 0;
  /// (mqtt-in node id, topic filter) in declaration order.
  std::vector<std::pair<std::string, std::string>> subscriptions;
};

struct World::Device {
  DeviceSpec spec;
  Rng rng;
  bool online = true;
  std::optional<double> stuck;
  double extra_noise = 0;
  TimeMs delay = 0;
  std::optional<EventId> next_tick;
  std::uint64_t reads = 0;

  Device(DeviceSpec s, std::uint64_t seed) : spec(std::move(s)), rng(seed) {}
};

std::vector<InstanceSpec> default_instances(std::size_t flows) {
  std::vector<InstanceSpec> out;
  for (std::size_t i = 0; i < flows; ++i) {
    out.push_back({flows == 1 ? "main" : "instance-" + std::to_string(i + 1), "10.0.0." + std::to_string(i + 1)});
  }
  return out;
}

World::World(std::vector<FlowGraph> flows, ScenarioScript script, const NodeRegistry& registry, Options options)
    : registry_(registry), script_(std::move(script)), options_(std::move(options)) {
  auto specs = script_.world.instances.empty() ? default_instances(flows.size()) : script_.world.instances;
  // One flow document is deployed on every declared instance.
  if (flows.size() == 1 && specs.size() > 1) {
    flows.resize(specs.size(), flows.front());
  }
  if (specs.size() != flows.size()) {
    throw ScenarioError("scenario: " + std::to_string(specs.size()) + " instances declared for " +
                        std::to_string(flows.size()) + " flow documents");
  }
  std::vector<std::string> names;
  for (const auto& s : specs) {
    names.push_back(s.name);
  }
  if (auto problems = check_targets(script_, names); !problems.empty()) {
    std::string msg = "scenario: invalid targets";
    for (const auto& p : problems) {
      msg += "\n  " + p;
    }
    throw ScenarioError(msg);
  }
  services_ = script_.world.services;
  if (options_.state_dir) {
    std::filesystem::create_directories(*options_.state_dir);
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto inst = std::make_unique<Instance>();
    inst->spec = specs[i];
    inst->graph = std::move(flows[i]);
    inst->seed = derive_seed(script_.seed, inst->spec.name);
    if (options_.state_dir) {
      inst->store = persistence::Store::open(*options_.state_dir / (inst->spec.name + ".store"));
    }
    for (const auto& n : inst->graph.nodes) {
      if (n.kind == "mqtt-in" && n.config.contains("topic") && n.config["topic"].is_string()) {
        inst->subscriptions.emplace_back(n.id, n.config["topic"].get<std::string>());
      }
    }
    instances_.push_back(std::move(inst));
  }
  for (const auto& d : script_.world.devices) {
    devices_.push_back(std::make_unique<Device>(d, derive_seed(script_.seed, "device:" + d.id)));
  }

  for (const auto& f : script_.events) {
    clock_.schedule_at(f.at, [this, f] { apply(f); });
  }
  for (auto& d : devices_) {
    if (d->spec.kind == DeviceKind::PeriodicSensor) {
      schedule_sensor(*d, d->spec.period);
    } else {
      for (TimeMs at : d->spec.swipes) {
        clock_.schedule_at(at, [this, dev = d.get()] {
          if (dev->online) {
            device_emit(*dev);
          }
        });
      }
    }
  }
  for (auto& inst : instances_) {
    start_instance(*inst);
  }
}

World::~World() {
  // Engines cancel their timers on destruction; tear them down before the clock.
  for (auto& inst : instances_) {
    inst->engine.reset();
  }
}

std::vector<std::string> World::instance_names() const {
  std::vector<std::string> out;
  for (const auto& inst : instances_) {
    out.push_back(inst->spec.name);
  }
  return out;
}

World::Instance& World::instance_at(std::string_view name) {
  for (auto& inst : instances_) {
    if (inst->spec.name == name) {
      return *inst;
    }
  }
  throw std::invalid_argument("world: unknown instance '" + std::string(name) + "'");
}

Engine* World::engine(std::string_view instance) {
  auto& inst = instance_at(instance);
  return inst.engine ? &*inst.engine : nullptr;
}

persistence::Store& World::store(std::string_view instance) { return instance_at(instance).store; }

bool World::device_online(std::string_view device) const {
  for (const auto& d : devices_) {
    if (d->spec.id == device) {
      return d->online;
    }
  }
  return false;
}

void World::start_instance(Instance& inst) {
  inst.engine.emplace(inst.graph, registry_, clock_, log_, inst.store, *this,
                      Engine::Options{inst.spec.name, inst.seed, inst.spec.address});
  inst.engine->start();
}

void World::schedule_sensor(Device& d, TimeMs at) {
  d.next_tick = clock_.schedule_at(at, [this, dev = &d] {
    // Next tick first, so this reading precedes timers restarted by its cascade.
    schedule_sensor(*dev, clock_.now() + dev->spec.period);
    device_emit(*dev);
  });
}

Payload World::sample(Device& d) {
  auto draw = [&](const ValueModel& m) {
    const double amp = m.noise_amp + d.extra_noise;
    double v = m.base + d.rng.uniform(-amp, amp);
    if (d.stuck) {
      return *d.stuck;
    }
    if (d.spec.resolution > 0) {
      const double steps = std::round(1.0 / d.spec.resolution);
      if (std::abs(steps * d.spec.resolution - 1.0) < 1e-9) {
        v = std::round(v * steps) / steps;
      } else {
        v = std::round(v / d.spec.resolution) * d.spec.resolution;
      }
    }
    return v;
  };
  if (d.spec.channels.empty()) {
    return draw(d.spec.value);
  }
  Payload out = Payload::object();
  for (const auto& [name, model] : d.spec.channels) {
    out[name] = draw(model);
  }
  return out;
}

void World::device_emit(Device& d) {
  Payload payload;
  if (d.spec.kind == DeviceKind::NfcReader) {
    payload = Payload{{"card", "card-" + std::to_string(++d.reads)}};
  } else {
    payload = sample(d);
  }
  log_.append(LogEntry{clock_.now(), "world", EventKind::Emit, d.spec.id, 0, d.spec.topic, compact(payload)});
  route(d.spec.id, d.delay, Message{d.spec.topic, std::move(payload), std::nullopt}, nullptr);
}

void World::route(const std::string& source, TimeMs link_delay, const Message& msg, const Instance* from) {
  for (auto& inst : instances_) {
    if (!inst->engine) {
      continue;
    }
    const TimeMs delay = link_delay + inst->delay + (from ? from->delay : 0);
    for (const auto& [node, filter] : inst->subscriptions) {
      if (!nodes::topic_matches(filter, msg.topic)) {
        continue;
      }
      if (delay == 0) {
        inst->engine->inject(node, msg, 0, source);
      } else {
        clock_.schedule_after(delay, [target = inst.get(), node = node, msg, source] {
          if (target->engine) {
            target->engine->inject(node, msg, 0, source);
          }
        });
      }
    }
  }
}

void World::publish(const std::string& instance, const Envelope& e) {
  const auto& from = instance_at(instance);
  route(instance + "/" + e.source, 0, e.message(), &from);
}

RequestStatus World::request(const std::string&, const std::string& service, const Envelope&) {
  for (const auto& s : services_) {
    if (s.name == service) {
      return s.up ? RequestStatus::Delivered : RequestStatus::ServiceDown;
    }
  }
  return RequestStatus::UnknownService;
}

std::vector<ServiceEndpoint> World::probe_services() const {
  std::vector<ServiceEndpoint> out;
  for (const auto& s : services_) {
    if (s.up) {
      out.push_back({s.name, s.host, s.port});
    }
  }
  return out;
}

std::vector<HostRecord> World::scan_hosts() const {
  std::vector<HostRecord> out;
  for (const auto& h : script_.world.hosts) {
    out.push_back({h.id, h.address, h.kind});
  }
  for (const auto& d : devices_) {
    if (d->online && !d->spec.address.empty()) {
      out.push_back({d->spec.id, d->spec.address, "device"});
    }
  }
  return out;
}

void World::broadcast(const std::string& instance, const std::string& datagram) {
  const auto& from = instance_at(instance);
  for (auto& inst : instances_) {
    if (inst.get() == &from || !inst->engine) {
      continue;
    }
    const TimeMs delay = from.delay + inst->delay;
    if (delay == 0) {
      inst->engine->deliver_datagram(datagram);
    } else {
      clock_.schedule_after(delay, [target = inst.get(), datagram] {
        if (target->engine) {
          target->engine->deliver_datagram(datagram);
        }
      });
    }
  }
}

void World::apply(const FaultEvent& f) {
  const bool on_instance = f.kind == FaultKind::InstanceCrash || f.kind == FaultKind::InstanceRestart ||
                           (f.kind == FaultKind::NetDelay &&
                            std::any_of(instances_.begin(), instances_.end(),
                                        [&](const auto& i) { return i->spec.name == f.target; }));
  log_.append(LogEntry{clock_.now(), on_instance ? f.target : "world", EventKind::Fault, f.target, std::nullopt,
                       std::string(to_string(f.kind)), compact(f.params)});

  auto device = [&]() -> Device& {
    for (auto& d : devices_) {
      if (d->spec.id == f.target) {
        return *d;
      }
    }
    throw std::logic_error("world: unknown device '" + f.target + "'");
  };
  auto service = [&]() -> ServiceSpec& {
    for (auto& s : services_) {
      if (s.name == f.target) {
        return s;
      }
    }
    throw std::logic_error("world: unknown service '" + f.target + "'");
  };

  switch (f.kind) {
    case FaultKind::DeviceOffline: {
      auto& d = device();
      d.online = false;
      if (d.next_tick) {
        clock_.cancel(*d.next_tick);
        d.next_tick.reset();
      }
      break;
    }
    case FaultKind::DeviceOnline: {
      auto& d = device();
      if (d.online) {
        break;
      }
      d.online = true;
      if (d.spec.kind == DeviceKind::PeriodicSensor) {
        // A rebooted sensor reports at once and keeps its period from then on.
        schedule_sensor(d, clock_.now() + d.spec.period);
        device_emit(d);
      }
      break;
    }
    case FaultKind::InstanceCrash:
      instance_at(f.target).engine.reset();
      break;
    case FaultKind::InstanceRestart: {
      auto& inst = instance_at(f.target);
      if (!inst.engine) {
        start_instance(inst);
      }
      break;
    }
    case FaultKind::NetDelay: {
      const TimeMs delay = f.params["delay_ms"].get<TimeMs>();
      bool found = false;
      for (auto& inst : instances_) {
        if (inst->spec.name == f.target) {
          inst->delay = delay;
          found = true;
        }
      }
      if (!found) {
        device().delay = delay;
      }
      break;
    }
    case FaultKind::ValueNoise:
      device().extra_noise = f.params["amp"].get<double>();
      break;
    case FaultKind::StuckValue: {
      auto& d = device();
      if (f.params["value"].is_null()) {
        d.stuck.reset();
      } else {
        d.stuck = f.params["value"].get<double>();
      }
      break;
    }
    case FaultKind::ServiceDown:
      service().up = false;
      break;
    case FaultKind::ServiceUp:
      service().up = true;
      break;
  }
}

TimelineLog run_scenario(std::vector<FlowGraph> flows, const ScenarioScript& script, const NodeRegistry& registry,
                         World::Options options) {
  World world(std::move(flows), script, registry, std::move(options));
  world.run();
  return world.log();
}

}  // namespace selfheal::sim
