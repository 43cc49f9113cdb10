#include "selfheal/nodes/registry.hpp"

#include <set>

#include "selfheal/core/flow_graph.hpp"
#include "selfheal/nodes/balancing.hpp"
#include "selfheal/nodes/compensation.hpp"
#include "selfheal/nodes/detection.hpp"
#include "selfheal/nodes/discovery.hpp"
#include "selfheal/nodes/io.hpp"
#include "selfheal/nodes/redundancy.hpp"
#include "selfheal/nodes/timing.hpp"

namespace selfheal::nodes {
namespace {

using Problems = std::vector<std::string>;

ConfigField required(std::string key, ConfigType type) { return {std::move(key), type, std::nullopt, false}; }
ConfigField with_default(std::string key, ConfigType type, Payload value) {
  return {std::move(key), type, std::move(value), false};
}
ConfigField optional_field(std::string key, ConfigType type) { return {std::move(key), type, std::nullopt, true}; }

std::optional<double> opt_number(const Payload& cfg, const char* key) {
  if (cfg.contains(key) && cfg[key].is_number()) {
    return cfg[key].get<double>();
  }
  return std::nullopt;
}

void positive(const Payload& cfg, const char* key, Problems& out) {
  if (auto v = opt_number(cfg, key); v && *v <= 0) {
    out.push_back(std::string(key) + " > 0");
  }
}

void non_negative(const Payload& cfg, const char* key, Problems& out) {
  if (auto v = opt_number(cfg, key); v && *v < 0) {
    out.push_back(std::string(key) + " >= 0");
  }
}

void one_of(const Payload& cfg, const char* key, std::set<std::string> allowed, Problems& out) {
  if (!cfg.contains(key) || !cfg[key].is_string()) {
    return;
  }
  if (!allowed.count(cfg[key].get<std::string>())) {
    std::string list;
    for (const auto& a : allowed) {
      list += (list.empty() ? "" : ", ") + a;
    }
    out.push_back(std::string(key) + " must be one of: " + list);
  }
}

std::optional<double> opt(const Payload& cfg, const char* key) { return opt_number(cfg, key); }

DebounceStrategy debounce_strategy(const std::string& s) {
  if (s == "first") return DebounceStrategy::First;
  if (s == "avg") return DebounceStrategy::Avg;
  if (s == "drop-extra") return DebounceStrategy::DropExtra;
  return DebounceStrategy::Last;
}

BalanceStrategy balance_strategy(const std::string& s) {
  if (s == "weightedRoundRobin") return BalanceStrategy::WeightedRoundRobin;
  if (s == "random") return BalanceStrategy::Random;
  return BalanceStrategy::RoundRobin;
}

NodeRegistry build() {
  NodeRegistry r;

  // Error detection.
  r.add({.kind = "threshold-check",
         .egress_names = {"reading", "error"},
         .config = {required("low", ConfigType::Number), required("high", ConfigType::Number)},
         .check =
             [](const Payload& c, Problems& out) {
               if (c["low"].get<double>() > c["high"].get<double>()) {
                 out.push_back("low ≤ high");
               }
             },
         .make = [](const NodeDef& d) {
           return std::make_unique<ThresholdCheckNode>(
               ThresholdConfig{d.config["low"].get<double>(), d.config["high"].get<double>()});
         }});

  r.add({.kind = "heartbeat",
         .egress_names = {"ping", "ok", "error"},
         .config = {with_default("ping", ConfigType::Any, "ping"), with_default("ok", ConfigType::Any, "ok"),
                    with_default("error", ConfigType::Any, "error"), with_default("mode", ConfigType::String, "passive"),
                    required("timeout", ConfigType::Duration)},
         .check =
             [](const Payload& c, Problems& out) {
               one_of(c, "mode", {"passive", "active"}, out);
               positive(c, "timeout", out);
             },
         .make = [](const NodeDef& d) {
           HeartbeatConfig cfg;
           cfg.ping = d.config["ping"];
           cfg.ok = d.config["ok"];
           cfg.error = d.config["error"];
           cfg.mode = d.config["mode"] == "active" ? HeartbeatMode::Active : HeartbeatMode::Passive;
           cfg.timeout = d.config["timeout"].get<TimeMs>();
           return std::make_unique<HeartbeatNode>(cfg);
         }});

  r.add({.kind = "readings-watcher",
         .egress_names = {"reading", "anomaly", "error"},
         .config = {with_default("minDelta", ConfigType::Number, 0), optional_field("maxDelta", ConfigType::Number),
                    with_default("stuckCount", ConfigType::Integer, 2)},
         .check =
             [](const Payload& c, Problems& out) {
               non_negative(c, "minDelta", out);
               positive(c, "maxDelta", out);
               if (c["stuckCount"].get<long long>() < 2) {
                 out.push_back("stuckCount >= 2");
               }
             },
         .make = [](const NodeDef& d) {
           WatcherConfig cfg;
           cfg.min_delta = d.config["minDelta"].get<double>();
           cfg.max_delta = opt(d.config, "maxDelta");
           cfg.stuck_count = d.config["stuckCount"].get<int>();
           return std::make_unique<ReadingsWatcherNode>(cfg);
         }});

  r.add({.kind = "timing-check",
         .egress_names = {"tooFast", "normal", "tooSlow"},
         .config = {required("expected", ConfigType::Duration), with_default("tolerance", ConfigType::Number, 0)},
         .check =
             [](const Payload& c, Problems& out) {
               positive(c, "expected", out);
               non_negative(c, "tolerance", out);
             },
         .make = [](const NodeDef& d) {
           return std::make_unique<TimingCheckNode>(
               TimingConfig{d.config["expected"].get<TimeMs>(), d.config["tolerance"].get<double>()});
         }});

  r.add({.kind = "resource-monitor",
         .egress_names = {"ok", "alert", "error"},
         .config = {required("metric", ConfigType::String), optional_field("nearMin", ConfigType::Number),
                    optional_field("nearMax", ConfigType::Number)},
         .check =
             [](const Payload& c, Problems& out) {
               if (!c.contains("nearMin") && !c.contains("nearMax")) {
                 out.push_back("nearMin or nearMax required");
               }
             },
         .make = [](const NodeDef& d) {
           return std::make_unique<ResourceMonitorNode>(ResourceMonitorConfig{
               d.config["metric"].get<std::string>(), opt(d.config, "nearMin"), opt(d.config, "nearMax")});
         }});

  r.add({.kind = "action-audit",
         .ingress = 2,
         .egress_names = {"confirmed", "failed"},
         .config = {required("timeout", ConfigType::Duration), with_default("match", ConfigType::String, "#")},
         .check = [](const Payload& c, Problems& out) { positive(c, "timeout", out); },
         .make = [](const NodeDef& d) {
           return std::make_unique<ActionAuditNode>(
               ActionAuditConfig{d.config["timeout"].get<TimeMs>(), d.config["match"].get<std::string>()});
         }});

  // Compensation.
  r.add({.kind = "compensate",
         .egress_names = {"value", "compensated", "error"},
         .config = {with_default("historyMaxSize", ConfigType::Integer, 10), required("interval", ConfigType::Duration),
                    with_default("strategy", ConfigType::String, "last"),
                    with_default("confidenceDecay", ConfigType::Number, 0.9)},
         .check =
             [](const Payload& c, Problems& out) {
               if (c["historyMaxSize"].get<long long>() <= 1) {
                 out.push_back("historyMaxSize > 1");
               }
               positive(c, "interval", out);
               one_of(c, "strategy", {"last", "avg", "max", "min"}, out);
               double decay = c["confidenceDecay"].get<double>();
               if (!(decay > 0 && decay <= 1)) {
                 out.push_back("confidenceDecay in (0, 1]");
               }
             },
         .make = [](const NodeDef& d) {
           CompensateConfig cfg;
           cfg.history_max_size = d.config["historyMaxSize"].get<std::size_t>();
           cfg.interval = d.config["interval"].get<TimeMs>();
           cfg.strategy = *parse_aggregate(d.config["strategy"].get<std::string>());
           cfg.confidence_decay = d.config["confidenceDecay"].get<double>();
           return std::make_unique<CompensateNode>(cfg);
         }});

  r.add({.kind = "checkpoint",
         .egress_names = {"message"},
         .config = {required("timeToLive", ConfigType::Duration)},
         .check = [](const Payload& c, Problems& out) { positive(c, "timeToLive", out); },
         .make = [](const NodeDef& d) {
           return std::make_unique<CheckpointNode>(d.config["timeToLive"].get<TimeMs>());
         }});

  r.add({.kind = "kalman-filter",
         .egress_names = {"value", "error"},
         .config = {with_default("q", ConfigType::Number, 0.01), with_default("r", ConfigType::Number, 1.0)},
         .check =
             [](const Payload& c, Problems& out) {
               non_negative(c, "q", out);
               positive(c, "r", out);
             },
         .make = [](const NodeDef& d) {
           return std::make_unique<KalmanNode>(KalmanConfig{d.config["q"].get<double>(), d.config["r"].get<double>()});
         }});

  r.add({.kind = "replication-voter",
         .egress_names = {"value", "noConsensus"},
         .config = {with_default("expected", ConfigType::Integer, 3),
                    with_default("quorum", ConfigType::String, "majority"),
                    with_default("window", ConfigType::Duration, 1000)},
         .check =
             [](const Payload& c, Problems& out) {
               if (c["expected"].get<long long>() < 2) {
                 out.push_back("expected >= 2");
               }
               one_of(c, "quorum", {"majority", "unanimity"}, out);
               positive(c, "window", out);
             },
         .make = [](const NodeDef& d) {
           VoterConfig cfg;
           cfg.expected = d.config["expected"].get<std::size_t>();
           cfg.quorum = d.config["quorum"] == "unanimity" ? Quorum::Unanimity : Quorum::Majority;
           cfg.window = d.config["window"].get<TimeMs>();
           return std::make_unique<ReplicationVoterNode>(cfg);
         }});

  r.add({.kind = "debounce",
         .egress_names = {"message", "error"},
         .config = {required("window", ConfigType::Duration), with_default("strategy", ConfigType::String, "last")},
         .check =
             [](const Payload& c, Problems& out) {
               positive(c, "window", out);
               one_of(c, "strategy", {"last", "first", "avg", "drop-extra"}, out);
             },
         .make = [](const NodeDef& d) {
           return std::make_unique<DebounceNode>(DebounceConfig{
               d.config["window"].get<TimeMs>(), debounce_strategy(d.config["strategy"].get<std::string>())});
         }});

  // Balancing and adaptation.
  r.add({.kind = "balancing",
         .dynamic_egress =
             [](const Payload& c) {
               return c.contains("outputs") && c["outputs"].is_number_integer() ? c["outputs"].get<int>() : 0;
             },
         .config = {required("outputs", ConfigType::Integer), with_default("strategy", ConfigType::String, "roundRobin"),
                    optional_field("weights", ConfigType::IntegerList), optional_field("seed", ConfigType::Integer)},
         .check =
             [](const Payload& c, Problems& out) {
               const auto n = c["outputs"].get<long long>();
               if (n < 2) {
                 out.push_back("outputs >= 2");
               }
               one_of(c, "strategy", {"roundRobin", "weightedRoundRobin", "random"}, out);
               if (c["strategy"] == "weightedRoundRobin") {
                 if (!c.contains("weights")) {
                   out.push_back("weightedRoundRobin requires weights");
                   return;
                 }
                 const auto& w = c["weights"];
                 if (static_cast<long long>(w.size()) != n) {
                   out.push_back("weights must have one entry per output");
                 }
                 for (const auto& x : w) {
                   if (x.get<long long>() <= 0) {
                     out.push_back("weights must be positive");
                     break;
                   }
                 }
               }
             },
         .make = [](const NodeDef& d) {
           BalancingConfig cfg;
           cfg.outputs = d.config["outputs"].get<std::size_t>();
           cfg.strategy = balance_strategy(d.config["strategy"].get<std::string>());
           if (d.config.contains("weights")) {
             cfg.weights = d.config["weights"].get<std::vector<std::uint32_t>>();
           }
           std::optional<std::uint64_t> seed;
           if (d.config.contains("seed")) {
             seed = d.config["seed"].get<std::uint64_t>();
           }
           return std::make_unique<BalancingNode>(cfg, seed);
         }});

  r.add({.kind = "flow-control",
         .egress_names = {"ack", "error"},
         .make = [](const NodeDef&) { return std::make_unique<FlowControlNode>(); }});

  r.add({.kind = "rbe",
         .egress_names = {"message"},
         .make = [](const NodeDef&) { return std::make_unique<RbeNode>(); }});

  r.add({.kind = "redundancy",
         .egress_names = {"role", "command"},
         .config = {with_default("electionTimeout", ConfigType::Duration, cluster::kDefaultElectionTimeout),
                    with_default("controlledFlows", ConfigType::StringList, Payload::array()),
                    optional_field("pingPeriod", ConfigType::Duration), optional_field("address", ConfigType::String)},
         .check =
             [](const Payload& c, Problems& out) {
               positive(c, "electionTimeout", out);
               positive(c, "pingPeriod", out);
               if (c.contains("address")) {
                 try {
                   cluster::InstanceId::parse(c["address"].get<std::string>());
                 } catch (const std::exception& ex) {
                   out.push_back(ex.what());
                 }
               }
             },
         .make =
             [](const NodeDef& d) {
               RedundancyConfig cfg;
               cfg.election_timeout = d.config["electionTimeout"].get<TimeMs>();
               cfg.controlled_flows = d.config["controlledFlows"].get<std::vector<std::string>>();
               if (d.config.contains("pingPeriod")) {
                 cfg.ping_period = d.config["pingPeriod"].get<TimeMs>();
               }
               if (d.config.contains("address")) {
                 cfg.address = d.config["address"].get<std::string>();
               }
               return std::make_unique<RedundancyNode>(cfg);
             },
         .initially_disabled_flows = [](const Payload& c) {
           return c["controlledFlows"].get<std::vector<std::string>>();
         }});

  // Discovery.
  r.add({.kind = "http-aware",
         .egress_names = {"event"},
         .config = {required("ports", ConfigType::IntegerList), required("period", ConfigType::Duration)},
         .check = [](const Payload& c, Problems& out) { positive(c, "period", out); },
         .make = [](const NodeDef& d) {
           auto ports = d.config["ports"].get<std::vector<int>>();
           return std::make_unique<HttpAwareNode>(std::set<int>(ports.begin(), ports.end()),
                                                  d.config["period"].get<TimeMs>());
         }});

  r.add({.kind = "network-aware",
         .egress_names = {"event"},
         .config = {required("period", ConfigType::Duration)},
         .check = [](const Payload& c, Problems& out) { positive(c, "period", out); },
         .make = [](const NodeDef& d) { return std::make_unique<NetworkAwareNode>(d.config["period"].get<TimeMs>()); }});

  r.add({.kind = "device-registry",
         .egress_names = {"change", "error"},
         .make = [](const NodeDef&) { return std::make_unique<DeviceRegistryNode>(); }});

  // Plumbing.
  r.add({.kind = "mqtt-in",
         .egress_names = {"message"},
         .config = {required("topic", ConfigType::String)},
         .make = [](const NodeDef& d) { return std::make_unique<MqttInNode>(d.config["topic"].get<std::string>()); }});

  r.add({.kind = "mqtt-out",
         .config = {optional_field("topic", ConfigType::String)},
         .make = [](const NodeDef& d) {
           std::optional<std::string> topic;
           if (d.config.contains("topic")) {
             topic = d.config["topic"].get<std::string>();
           }
           return std::make_unique<MqttOutNode>(topic);
         }});

  r.add({.kind = "http-out",
         .egress_names = {"response"},
         .config = {required("service", ConfigType::String), optional_field("topic", ConfigType::String)},
         .make = [](const NodeDef& d) {
           std::optional<std::string> topic;
           if (d.config.contains("topic")) {
             topic = d.config["topic"].get<std::string>();
           }
           return std::make_unique<HttpOutNode>(d.config["service"].get<std::string>(), topic);
         }});

  r.add({.kind = "inject",
         .ingress = 0,
         .egress_names = {"message"},
         .config = {required("period", ConfigType::Duration), with_default("payload", ConfigType::Any, "tick"),
                    with_default("topic", ConfigType::String, "")},
         .check = [](const Payload& c, Problems& out) { positive(c, "period", out); },
         .make = [](const NodeDef& d) {
           return std::make_unique<InjectNode>(d.config["period"].get<TimeMs>(), d.config["payload"],
                                               d.config["topic"].get<std::string>());
         }});

  r.add({.kind = "debug", .make = [](const NodeDef&) { return std::make_unique<DebugNode>(); }});

  r.add({.kind = "extract",
         .egress_names = {"value", "error"},
         .config = {required("field", ConfigType::String)},
         .make = [](const NodeDef& d) { return std::make_unique<ExtractNode>(d.config["field"].get<std::string>()); }});

  r.add({.kind = "switch",
         .egress_names = {"match", "otherwise"},
         .config = {with_default("property", ConfigType::String, ""), required("equals", ConfigType::Any)},
         .make = [](const NodeDef& d) {
           return std::make_unique<SwitchNode>(d.config["property"].get<std::string>(), d.config["equals"]);
         }});

  return r;
}

}  // namespace

const NodeRegistry& builtin_registry() {
  static const NodeRegistry registry = build();
  return registry;
}

}  // namespace selfheal::nodes
