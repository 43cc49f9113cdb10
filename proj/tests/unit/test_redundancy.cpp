#include "doctest.h"
#include "harness.hpp"
#include "selfheal/nodes/redundancy.hpp"

using namespace selfheal;
using harness::times;
using harness::values;

namespace {

class Wire final : public Environment {
 public:
  std::vector<std::pair<TimeMs, std::string>> sent;
  Scheduler* clock = nullptr;
  void broadcast(const std::string&, const std::string& datagram) override { sent.emplace_back(clock->now(), datagram); }
};

constexpr std::string_view kFlow = R"({"nodes":[
  {"id":"r","type":"redundancy","config":{"controlledFlows":["ingest"]}},
  {"id":"sink","type":"debug","flow":"ingest"}]})";

struct Rig {
  Scheduler clock;
  TimelineLog log;
  persistence::Store store;
  Wire wire;
  std::optional<Engine> engine;

  explicit Rig(std::string address) {
    wire.clock = &clock;
    engine.emplace(harness::flow(kFlow), nodes::builtin_registry(), clock, log, store, wire,
                   Engine::Options{"self", 1, std::move(address)});
    engine->start();
  }

  void ping_at(TimeMs at, const std::string& from) {
    clock.schedule_at(at, [this, at, from] {
      engine->deliver_datagram(cluster::encode_ping(cluster::InstanceId::parse(from), 0, at));
    });
  }

  std::vector<std::string> roles() const {
    std::vector<std::string> out;
    for (const auto& v : values(harness::select(log, EventKind::Emit, "r", 0))) {
      out.push_back(v["role"].get<std::string>());
    }
    return out;
  }
};

}  // namespace

TEST_CASE("controlled flows start disabled and a lone instance takes over at start") {
  Rig rig("10.0.0.5");
  CHECK_FALSE(rig.engine->flow_enabled("ingest"));
  rig.clock.run_until(0);
  CHECK(rig.roles() == std::vector<std::string>{"master"});
  auto commands = values(harness::select(rig.log, EventKind::Emit, "r", 1));
  CHECK(commands == std::vector<Payload>{{{"action", "enable"}, {"flow", "ingest"}}});
  CHECK(harness::select(rig.log, EventKind::RoleChange, "r").size() == 1);
}

TEST_CASE("pings go out at start and every timeout / 5") {
  Rig rig("10.0.0.5");
  rig.clock.run_until(10000);
  std::vector<TimeMs> at;
  for (const auto& [t, d] : rig.wire.sent) {
    at.push_back(t);
    CHECK(cluster::decode_ping(d).address == "10.0.0.5");
  }
  CHECK(at == std::vector<TimeMs>{0, 3000, 6000, 9000});
}

TEST_CASE("a higher peer demotes, its silence promotes back after timeout + 1") {
  Rig rig("192.168.1.54");
  rig.ping_at(5000, "192.168.1.201");
  rig.clock.run_until(40000);
  CHECK(rig.roles() == std::vector<std::string>{"master", "standby", "master"});
  auto changes = harness::select(rig.log, EventKind::Emit, "r", 0);
  CHECK(times(changes) == std::vector<TimeMs>{0, 5000, 20001});
  auto cmds = values(harness::select(rig.log, EventKind::Emit, "r", 1));
  REQUIRE(cmds.size() == 3);
  CHECK(cmds[1]["action"] == "disable");
  CHECK(cmds[2]["action"] == "enable");
  // A fresh peer is answered at once.
  CHECK(std::count_if(rig.wire.sent.begin(), rig.wire.sent.end(), [](const auto& s) { return s.first == 5000; }) == 1);
}

TEST_CASE("regular pings keep the peer alive") {
  Rig rig("192.168.1.54");
  for (TimeMs t = 1000; t <= 60000; t += 3000) {
    rig.ping_at(t, "192.168.1.201");
  }
  rig.clock.run_until(75000);
  CHECK(times(harness::select(rig.log, EventKind::Emit, "r", 0)) == std::vector<TimeMs>{0, 1000, 73001});
}

TEST_CASE("a lower peer does not change the role") {
  Rig rig("192.168.1.201");
  rig.ping_at(5000, "192.168.1.54");
  rig.clock.run_until(40000);
  CHECK(rig.roles() == std::vector<std::string>{"master"});
}

TEST_CASE("malformed datagrams are reported, own pings ignored") {
  Rig rig("10.0.0.5");
  rig.engine->deliver_datagram("SHEN/1 HELLO\n");
  rig.engine->deliver_datagram(cluster::encode_ping(cluster::InstanceId::parse("10.0.0.5"), 0, 0));
  CHECK(harness::select(rig.log, EventKind::Error, "r").size() == 1);
  CHECK(rig.engine->node_as<nodes::RedundancyNode>("r").state()->peers().peers().empty());
}

TEST_CASE("redundancy config validation") {
  CHECK(harness::invalid(harness::single("redundancy", {{"address", "10.0.0"}})));
  CHECK(harness::invalid(harness::single("redundancy", {{"electionTimeout", 0}})));
  CHECK_FALSE(harness::invalid(harness::single("redundancy", {{"address", "10.0.0.1"}})));
}
