#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/core/engine.hpp"
#include "selfheal/core/random.hpp"
#include "selfheal/sim/scenario.hpp"

namespace selfheal::sim {

/// Instance names used when the scenario declares none: "main" for a single
/// flow, "instance-1".."instance-n" otherwise.
std::vector<InstanceSpec> default_instances(std::size_t flows);

/// The simulated environment: broker, devices, external services, host
/// inventory, cluster transport, and one engine per instance, all driven by a
/// single virtual clock.
///
/// At construction the scripted faults are queued first, then the device
/// schedules, then every instance starts in declaration order. Events at the
/// same instant therefore run faults, device output, and engine timers in
/// that order. Deliveries with no configured delay are synchronous.
class World final : public Environment {
 public:
  struct Options {
    /// When set, each instance keeps its store in <dir>/<instance>.store.
    std::optional<std::filesystem::path> state_dir;
  };

  /// Throws ScenarioError for unknown fault targets or an instance count that
  /// does not match the flows, FlowError for invalid flows.
  World(std::vector<FlowGraph> flows, ScenarioScript script, const NodeRegistry& registry, Options options);
  World(std::vector<FlowGraph> flows, ScenarioScript script, const NodeRegistry& registry)
      : World(std::move(flows), std::move(script), registry, Options{}) {}
  ~World() override;

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  void run_until(TimeMs t_end) { clock_.run_until(t_end); }
  void run() { run_until(script_.duration); }

  const TimelineLog& log() const { return log_; }
  Scheduler& clock() { return clock_; }
  const ScenarioScript& script() const { return script_; }

  std::vector<std::string> instance_names() const;
  /// Null while the instance is crashed.
  Engine* engine(std::string_view instance);
  persistence::Store& store(std::string_view instance);
  bool device_online(std::string_view device) const;

  void publish(const std::string& instance, const Envelope& e) override;
  RequestStatus request(const std::string& instance, const std::string& service, const Envelope& e) override;
  std::vector<ServiceEndpoint> probe_services() const override;
  std::vector<HostRecord> scan_hosts() const override;
  void broadcast(const std::string& instance, const std::string& datagram) override;

 private:
  struct Instance;
  struct Device;

  Instance& instance_at(std::string_view name);
  void start_instance(Instance& inst);
  void apply(const FaultEvent& f);
  void schedule_sensor(Device& d, TimeMs at);
  void device_emit(Device& d);
  Payload sample(Device& d);
  void route(const std::string& source, TimeMs link_delay, const Message& msg, const Instance* from);

  const NodeRegistry& registry_;
  ScenarioScript script_;
  Options options_;
  Scheduler clock_;
  TimelineLog log_;
  std::vector<std::unique_ptr<Instance>> instances_;
  std::vector<std::unique_ptr<Device>> devices_;
  std::vector<ServiceSpec> services_;
};

/// Co-simulates the scenario to its duration and returns the merged log.
TimelineLog run_scenario(std::vector<FlowGraph> flows, const ScenarioScript& script, const NodeRegistry& registry,
                         World::Options options = {});

}  // namespace selfheal::sim
