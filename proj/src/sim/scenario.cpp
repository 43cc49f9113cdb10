#include "selfheal/sim/scenario.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace selfheal::sim {
namespace {

constexpr std::array<std::pair<FaultKind, std::string_view>, 9> kFaultNames{{
    {FaultKind::DeviceOffline, "device_offline"},
    {FaultKind::DeviceOnline, "device_online"},
    {FaultKind::InstanceCrash, "instance_crash"},
    {FaultKind::InstanceRestart, "instance_restart"},
    {FaultKind::NetDelay, "net_delay"},
    {FaultKind::ValueNoise, "value_noise"},
    {FaultKind::StuckValue, "stuck_value"},
    {FaultKind::ServiceDown, "service_down"},
    {FaultKind::ServiceUp, "service_up"},
}};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario: " + where + ": " + what);
}

void only_keys(const Payload& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) {
    fail(where, "expected an object");
  }
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) {
      fail(where, "unknown key \"" + k + "\"");
    }
  }
}

TimeMs get_ms(const Payload& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    fail(where, std::string("missing \"") + key + "\"");
  }
  const auto& v = obj[key];
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(where, std::string("\"") + key + "\" must be a non-negative integer");
  }
  return v.get<TimeMs>();
}

std::string get_string(const Payload& obj, const char* key, const std::string& where, bool required = true) {
  if (!obj.contains(key)) {
    if (required) {
      fail(where, std::string("missing \"") + key + "\"");
    }
    return {};
  }
  if (!obj[key].is_string()) {
    fail(where, std::string("\"") + key + "\" must be a string");
  }
  return obj[key].get<std::string>();
}

double get_number(const Payload& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) {
    return fallback;
  }
  if (!obj[key].is_number()) {
    fail(where, std::string("\"") + key + "\" must be a number");
  }
  return obj[key].get<double>();
}

ValueModel parse_model(const Payload& obj, const std::string& where) {
  return ValueModel{get_number(obj, "base", 0, where), get_number(obj, "noise_amp", 0, where)};
}

DeviceSpec parse_device(const Payload& obj, const std::string& where) {
  only_keys(obj, where,
            {"id", "kind", "topic", "period_ms", "base", "noise_amp", "channels", "resolution", "address", "swipes_ms"});
  DeviceSpec d;
  d.id = get_string(obj, "id", where);
  const std::string kind = get_string(obj, "kind", where);
  if (kind == "periodicSensor") {
    d.kind = DeviceKind::PeriodicSensor;
  } else if (kind == "nfcReader") {
    d.kind = DeviceKind::NfcReader;
  } else {
    fail(where, "unknown device kind \"" + kind + "\"");
  }
  d.topic = get_string(obj, "topic", where);
  if (obj.contains("period_ms")) {
    d.period = get_ms(obj, "period_ms", where);
  }
  if (d.kind == DeviceKind::PeriodicSensor && d.period <= 0) {
    fail(where, "period_ms must be positive");
  }
  d.value = parse_model(obj, where);
  if (obj.contains("channels")) {
    if (!obj["channels"].is_object()) {
      fail(where, "\"channels\" must be an object");
    }
    for (const auto& [name, model] : obj["channels"].items()) {
      only_keys(model, where + ".channels." + name, {"base", "noise_amp"});
      d.channels.emplace(name, parse_model(model, where + ".channels." + name));
    }
  }
  d.resolution = get_number(obj, "resolution", 0.1, where);
  if (d.resolution < 0) {
    fail(where, "resolution must be non-negative");
  }
  d.address = get_string(obj, "address", where, false);
  if (obj.contains("swipes_ms")) {
    if (!obj["swipes_ms"].is_array()) {
      fail(where, "\"swipes_ms\" must be a list");
    }
    for (const auto& s : obj["swipes_ms"]) {
      if (!s.is_number_integer() || s.get<long long>() < 0) {
        fail(where, "\"swipes_ms\" entries must be non-negative integers");
      }
      d.swipes.push_back(s.get<TimeMs>());
    }
    std::sort(d.swipes.begin(), d.swipes.end());
  }
  return d;
}

WorldSpec parse_world(const Payload& obj) {
  only_keys(obj, "world", {"instances", "devices", "services", "hosts"});
  WorldSpec w;
  auto list = [&](const char* key) {
    if (!obj.contains(key)) {
      return Payload::array();
    }
    if (!obj[key].is_array()) {
      fail("world", std::string("\"") + key + "\" must be a list");
    }
    return obj[key];
  };
  std::set<std::string> ids;
  auto unique = [&](const std::string& id, const std::string& where) {
    if (!ids.insert(id).second) {
      fail(where, "duplicate id \"" + id + "\"");
    }
  };
  std::size_t i = 0;
  for (const auto& inst : list("instances")) {
    const std::string where = "world.instances[" + std::to_string(i++) + "]";
    only_keys(inst, where, {"name", "address"});
    w.instances.push_back({get_string(inst, "name", where), get_string(inst, "address", where)});
    unique(w.instances.back().name, where);
  }
  i = 0;
  for (const auto& dev : list("devices")) {
    const std::string where = "world.devices[" + std::to_string(i++) + "]";
    w.devices.push_back(parse_device(dev, where));
    unique(w.devices.back().id, where);
  }
  i = 0;
  for (const auto& svc : list("services")) {
    const std::string where = "world.services[" + std::to_string(i++) + "]";
    only_keys(svc, where, {"name", "host", "port", "up"});
    ServiceSpec s;
    s.name = get_string(svc, "name", where);
    s.host = get_string(svc, "host", where, false);
    if (svc.contains("port")) {
      if (!svc["port"].is_number_integer()) {
        fail(where, "\"port\" must be an integer");
      }
      s.port = svc["port"].get<int>();
    }
    if (svc.contains("up")) {
      if (!svc["up"].is_boolean()) {
        fail(where, "\"up\" must be a bool");
      }
      s.up = svc["up"].get<bool>();
    }
    unique(s.name, where);
    w.services.push_back(std::move(s));
  }
  i = 0;
  for (const auto& host : list("hosts")) {
    const std::string where = "world.hosts[" + std::to_string(i++) + "]";
    only_keys(host, where, {"id", "address", "kind"});
    HostSpec h{get_string(host, "id", where), get_string(host, "address", where), "host"};
    if (host.contains("kind")) {
      h.kind = get_string(host, "kind", where);
    }
    unique(h.id, where);
    w.hosts.push_back(std::move(h));
  }
  return w;
}

void check_params(const FaultEvent& f, const std::string& where) {
  if (!f.params.is_object()) {
    fail(where, "\"params\" must be an object");
  }
  switch (f.kind) {
    case FaultKind::NetDelay:
      get_ms(f.params, "delay_ms", where + ".params");
      break;
    case FaultKind::ValueNoise:
      if (!f.params.contains("amp") || !f.params["amp"].is_number() || f.params["amp"].get<double>() < 0) {
        fail(where + ".params", "\"amp\" must be a non-negative number");
      }
      break;
    case FaultKind::StuckValue:
      if (!f.params.contains("value") || !(f.params["value"].is_number() || f.params["value"].is_null())) {
        fail(where + ".params", "\"value\" must be a number (or null to release)");
      }
      break;
    default:
      break;
  }
}

}  // namespace

std::string_view to_string(FaultKind kind) {
  for (const auto& [k, name] : kFaultNames) {
    if (k == kind) {
      return name;
    }
  }
  return "unknown";
}

std::optional<FaultKind> parse_fault_kind(std::string_view text) {
  for (const auto& [k, name] : kFaultNames) {
    if (name == text) {
      return k;
    }
  }
  return std::nullopt;
}

ScenarioScript parse_scenario(std::string_view text) {
  Payload doc;
  try {
    doc = Payload::parse(text);
  } catch (const Payload::parse_error& e) {
    throw ScenarioError(std::string("scenario: syntax error: ") + e.what());
  }
  only_keys(doc, "document", {"seed", "duration_ms", "events", "world"});
  ScenarioScript s;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      fail("seed", "must be an unsigned integer");
    }
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  s.duration = get_ms(doc, "duration_ms", "document");
  if (doc.contains("events")) {
    if (!doc["events"].is_array()) {
      fail("events", "must be a list");
    }
    std::size_t i = 0;
    for (const auto& ev : doc["events"]) {
      const std::string where = "events[" + std::to_string(i++) + "]";
      only_keys(ev, where, {"at_ms", "kind", "target", "params"});
      FaultEvent f;
      f.at = get_ms(ev, "at_ms", where);
      const std::string kind = get_string(ev, "kind", where);
      auto k = parse_fault_kind(kind);
      if (!k) {
        fail(where, "unknown fault kind \"" + kind + "\"");
      }
      f.kind = *k;
      f.target = get_string(ev, "target", where);
      if (ev.contains("params")) {
        f.params = ev["params"];
      }
      check_params(f, where);
      if (f.at > s.duration) {
        fail(where, "at_ms " + std::to_string(f.at) + " exceeds duration_ms " + std::to_string(s.duration));
      }
      s.events.push_back(std::move(f));
    }
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const FaultEvent& a, const FaultEvent& b) { return a.at < b.at; });
  if (doc.contains("world")) {
    s.world = parse_world(doc["world"]);
  }
  return s;
}

std::vector<std::string> check_targets(const ScenarioScript& script, const std::vector<std::string>& instances) {
  std::set<std::string> devices;
  std::set<std::string> services;
  for (const auto& d : script.world.devices) {
    devices.insert(d.id);
  }
  for (const auto& s : script.world.services) {
    services.insert(s.name);
  }
  const std::set<std::string> inst(instances.begin(), instances.end());
  std::vector<std::string> problems;
  for (const auto& f : script.events) {
    bool ok = true;
    switch (f.kind) {
      case FaultKind::DeviceOffline:
      case FaultKind::DeviceOnline:
      case FaultKind::ValueNoise:
      case FaultKind::StuckValue:
        ok = devices.count(f.target) > 0;
        break;
      case FaultKind::InstanceCrash:
      case FaultKind::InstanceRestart:
        ok = inst.count(f.target) > 0;
        break;
      case FaultKind::NetDelay:
        ok = devices.count(f.target) > 0 || inst.count(f.target) > 0;
        break;
      case FaultKind::ServiceDown:
      case FaultKind::ServiceUp:
        ok = services.count(f.target) > 0;
        break;
    }
    if (!ok) {
      problems.push_back("event at " + std::to_string(f.at) + " (" + std::string(to_string(f.kind)) +
                         "): unknown target \"" + f.target + "\"");
    }
  }
  return problems;
}

}  // namespace selfheal::sim
