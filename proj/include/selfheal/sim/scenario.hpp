#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selfheal/core/envelope.hpp"

namespace selfheal::sim {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FaultKind {
  DeviceOffline,
  DeviceOnline,
  InstanceCrash,
  InstanceRestart,
  NetDelay,
  ValueNoise,
  StuckValue,
  ServiceDown,
  ServiceUp,
};

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view text);

struct FaultEvent {
  TimeMs at = 0;
  FaultKind kind = FaultKind::DeviceOffline;
  std::string target;
  Payload params = Payload::object();
};

enum class DeviceKind { PeriodicSensor, NfcReader };

struct ValueModel {
  double base = 0;
  double noise_amp = 0;
};

struct DeviceSpec {
  std::string id;
  DeviceKind kind = DeviceKind::PeriodicSensor;
  std::string topic;
  TimeMs period = 60'000;
  /// Scalar model, used when `channels` is empty.
  ValueModel value;
  /// Named channels produce a record payload {name: value, ...}.
  std::map<std::string, ValueModel> channels;
  /// Readings are rounded to this step; 0 disables rounding.
  double resolution = 0.1;
  std::string address;
  /// Card-read instants for NFC readers.
  std::vector<TimeMs> swipes;
};

struct ServiceSpec {
  std::string name;
  std::string host;
  int port = 80;
  bool up = true;
};

struct HostSpec {
  std::string id;
  std::string address;
  std::string kind = "host";
};

struct InstanceSpec {
  std::string name;
  std::string address;
};

struct WorldSpec {
  std::vector<InstanceSpec> instances;
  std::vector<DeviceSpec> devices;
  std::vector<ServiceSpec> services;
  std::vector<HostSpec> hosts;
};

struct ScenarioScript {
  std::uint64_t seed = 0;
  TimeMs duration = 0;
  std::vector<FaultEvent> events;  // sorted by `at`, stable
  WorldSpec world;
};

/// Parses a scenario document:
///   {"seed": u64, "duration_ms": u64,
///    "events": [{"at_ms": u64, "kind": str, "target": str, "params": {...}}],
///    "world": {"instances": [...], "devices": [...], "services": [...], "hosts": [...]}}
/// Events are sorted by time (ties keep document order). Throws ScenarioError
/// on syntax errors, unknown fault kinds, missing parameters, and events past
/// the duration.
ScenarioScript parse_scenario(std::string_view text);

/// Checks every event target against the world, given the instance names in
/// use. Returns one message per problem.
std::vector<std::string> check_targets(const ScenarioScript& script, const std::vector<std::string>& instances);

}  // namespace selfheal::sim
