#include "doctest.h"
#include "harness.hpp"

using namespace selfheal;
using namespace selfheal::sim;

TEST_CASE("fault kind names round trip") {
  for (auto k : {FaultKind::DeviceOffline, FaultKind::DeviceOnline, FaultKind::InstanceCrash,
                 FaultKind::InstanceRestart, FaultKind::NetDelay, FaultKind::ValueNoise, FaultKind::StuckValue,
                 FaultKind::ServiceDown, FaultKind::ServiceUp}) {
    CHECK(parse_fault_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_fault_kind("meteor").has_value());
}

TEST_CASE("bundled scenarios parse") {
  for (const char* name : {"sensor-failure", "load-spike", "failover"}) {
    CAPTURE(name);
    auto s = harness::scenario_script(name);
    CHECK(s.duration > 0);
    CHECK_FALSE(s.world.devices.empty());
  }
  auto a = harness::scenario_script("sensor-failure");
  CHECK(a.seed == 7);
  REQUIRE(a.events.size() == 2);
  CHECK(a.events[0].kind == FaultKind::DeviceOffline);
  CHECK(a.events[0].at == 740000);
  CHECK(a.world.devices[0].channels.at("humidity").noise_amp == 5);
}

TEST_CASE("events are sorted stably by time") {
  auto s = parse_scenario(R"({"seed":1,"duration_ms":100,"world":{},"events":[
    {"at_ms":50,"kind":"service_down","target":"b"},
    {"at_ms":10,"kind":"service_down","target":"a"},
    {"at_ms":50,"kind":"service_up","target":"c"}]})");
  REQUIRE(s.events.size() == 3);
  CHECK(s.events[0].target == "a");
  CHECK(s.events[1].target == "b");
  CHECK(s.events[2].target == "c");
}

TEST_CASE("scenario errors") {
  const char* bad[] = {
      "{",
      R"({"seed":1,"duration_ms":100,"events":[{"at_ms":1,"kind":"meteor","target":"x"}]})",
      R"({"seed":1,"duration_ms":100,"events":[{"at_ms":200,"kind":"service_down","target":"x"}]})",
      R"({"seed":1,"duration_ms":100,"events":[{"at_ms":1,"kind":"net_delay","target":"x"}]})",
      R"({"seed":1,"duration_ms":100,"events":[{"at_ms":1,"kind":"value_noise","target":"x","params":{"amp":-1}}]})",
      R"({"seed":1,"duration_ms":100,"events":[{"at_ms":1,"kind":"stuck_value","target":"x","params":{"value":"a"}}]})",
      R"({"seed":1,"duration_ms":100,"bogus":true})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_scenario(text), ScenarioError);
  }
}

TEST_CASE("target checks") {
  auto s = parse_scenario(R"({"seed":1,"duration_ms":100,
    "world":{"devices":[{"id":"d","kind":"periodicSensor","topic":"t"}],"services":[{"name":"svc","host":"h"}]},
    "events":[{"at_ms":1,"kind":"device_offline","target":"d"},
              {"at_ms":2,"kind":"instance_crash","target":"main"},
              {"at_ms":3,"kind":"service_down","target":"svc"},
              {"at_ms":4,"kind":"net_delay","target":"ghost","params":{"delay_ms":5}},
              {"at_ms":5,"kind":"instance_restart","target":"node-z"}]})");
  auto problems = check_targets(s, {"main"});
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].find("ghost") != std::string::npos);
  CHECK(problems[1].find("node-z") != std::string::npos);
}
