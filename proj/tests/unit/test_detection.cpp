#include "doctest.h"
#include "harness.hpp"
#include "oracles.hpp"
#include "selfheal/nodes/detection.hpp"

using namespace selfheal;
using namespace selfheal::nodes;
using harness::msg;
using harness::out;
using harness::single;
using harness::times;
using harness::values;

TEST_CASE("threshold boundaries are inclusive") {
  ThresholdConfig cfg{0, 50};
  CHECK(within_threshold(0, cfg));
  CHECK(within_threshold(50, cfg));
  CHECK(within_threshold(22.3, cfg));
  CHECK_FALSE(within_threshold(-0.1, cfg));
  CHECK_FALSE(within_threshold(50.0001, cfg));
}

TEST_CASE("threshold node routes readings") {
  Runtime rt(single("threshold-check", {{"low", 0}, {"high", 50}}), builtin_registry());
  for (Payload p : {Payload(22.3), Payload(61.0), Payload(0), Payload("hot"), Payload(50)}) {
    rt.engine().inject("n", msg(p));
  }
  CHECK(values(out(rt.log(), 0)) == std::vector<Payload>{22.3, 0, 50});
  auto errors = values(out(rt.log(), 1));
  REQUIRE(errors.size() == 2);
  CHECK(errors[0]["error"] == "out-of-range");
  CHECK(errors[0]["value"] == 61.0);
  CHECK(errors[1]["error"] == "malformed");
}

TEST_CASE("threshold partitions random readings exactly") {
  Rng rng(5);
  Runtime rt(single("threshold-check", {{"low", 20}, {"high", 90}}), builtin_registry());
  std::size_t inside = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const double v = rng.uniform(-50, 150);
    inside += (20 <= v && v <= 90) ? 1 : 0;
    rt.engine().inject("n", msg(v));
  }
  CHECK(out(rt.log(), 0).size() == inside);
  CHECK(out(rt.log(), 1).size() == n - inside);
}

TEST_CASE("threshold config validation") {
  CHECK(harness::invalid(single("threshold-check", {{"low", 5}, {"high", 1}})));
  CHECK(harness::invalid(single("threshold-check", {{"low", 5}})));
  CHECK_FALSE(harness::invalid(single("threshold-check", {{"low", 5}, {"high", 5}})));
}

TEST_CASE("readings watcher") {
  ReadingsWatcher w(WatcherConfig{0.05, 10.0, 3});
  CHECK(w.observe(20.0) == Anomaly::None);
  CHECK(w.observe(20.5) == Anomaly::None);
  CHECK(w.observe(35.0) == Anomaly::MaxChange);
  CHECK(w.observe(35.01) == Anomaly::MinChange);
  CHECK(w.observe(35.01) == Anomaly::MinChange);  // run of 2 is below stuckCount
  CHECK(w.observe(35.01) == Anomaly::StuckAt);
  CHECK(w.observe(36.0) == Anomaly::None);
}

TEST_CASE("readings watcher node emits anomaly details") {
  Runtime rt(single("readings-watcher", {{"maxDelta", 5}}), builtin_registry());
  for (double v : {10.0, 11.0, 30.0, 30.0}) {
    rt.engine().inject("n", msg(v));
  }
  rt.engine().inject("n", msg("x"));
  CHECK(values(out(rt.log(), 0)) == std::vector<Payload>{10.0, 11.0});
  auto anomalies = values(out(rt.log(), 1));
  REQUIRE(anomalies.size() == 2);
  CHECK(anomalies[0]["anomaly"] == "max-change");
  CHECK(anomalies[0]["previous"] == 11.0);
  CHECK(anomalies[1]["anomaly"] == "stuck-at");
  CHECK(out(rt.log(), 2).size() == 1);
}

TEST_CASE("resource monitor") {
  Runtime rt(single("resource-monitor", {{"metric", "battery"}, {"nearMin", 15}}), builtin_registry());
  rt.engine().inject("n", msg({{"battery", 80}}));
  rt.engine().inject("n", msg({{"battery", 15}}));
  rt.engine().inject("n", msg({{"cpu", 1}}));
  rt.engine().inject("n", msg({{"battery", "low"}}));
  CHECK(out(rt.log(), 0).size() == 1);
  auto alerts = values(out(rt.log(), 1));
  REQUIRE(alerts.size() == 1);
  CHECK(alerts[0]["bound"] == "nearMin");
  auto errors = values(out(rt.log(), 2));
  REQUIRE(errors.size() == 2);
  CHECK(errors[0]["error"] == "missing-metric");
  CHECK(errors[1]["error"] == "malformed");
  CHECK(harness::invalid(single("resource-monitor", {{"metric", "battery"}})));
}

TEST_CASE("heartbeat errors once per timeout during silence") {
  Runtime rt(single("heartbeat", {{"timeout", 90000}}), builtin_registry());
  rt.inject_at(60000, "n", msg("beat"));
  rt.run_until(400000);
  CHECK(times(out(rt.log(), 1)) == std::vector<TimeMs>{60000});
  CHECK(times(out(rt.log(), 2)) == std::vector<TimeMs>{150000, 240000, 330000});
  CHECK(out(rt.log(), 0).empty());  // passive mode never pings
}

TEST_CASE("heartbeat boundary: input at the deadline instant") {
  // The timer scheduled first fires first at equal times.
  Runtime rt(single("heartbeat", {{"timeout", 1000}}), builtin_registry());
  rt.inject_at(1000, "n", msg(1));
  rt.run_until(1999);
  CHECK(times(out(rt.log(), 2)) == std::vector<TimeMs>{1000});
  CHECK(times(out(rt.log(), 1)) == std::vector<TimeMs>{1000});
}

TEST_CASE("active heartbeat pings on each input with configured payloads") {
  Runtime rt(single("heartbeat", {{"timeout", 500}, {"mode", "active"}, {"ok", "alive"}, {"error", {{"down", true}}}}),
             builtin_registry());
  rt.inject_at(100, "n", msg(1));
  rt.run_until(700);
  CHECK(values(out(rt.log(), 0)) == std::vector<Payload>{"ping"});
  CHECK(values(out(rt.log(), 1)) == std::vector<Payload>{"alive"});
  CHECK(values(out(rt.log(), 2)) == std::vector<Payload>{{{"down", true}}});
  CHECK(times(out(rt.log(), 2)) == std::vector<TimeMs>{600});
}

TEST_CASE("heartbeat matches the oracle on random input schedules") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const TimeMs timeout = 100 + static_cast<TimeMs>(rng.below(900));
    const TimeMs t_end = 20000;
    std::vector<std::int64_t> inputs;
    const auto n = rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
      inputs.push_back(1 + static_cast<TimeMs>(rng.below(t_end - 1)));
    }
    std::sort(inputs.begin(), inputs.end());
    inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
    // An input landing on a deadline is a tie the oracle resolves as an
    // expiry; the ordering rule is covered by the boundary case above.
    auto expected = oracle::heartbeat_errors(0, inputs, timeout, t_end);
    bool tie = false;
    for (auto in : inputs) {
      tie = tie || std::find(expected.begin(), expected.end(), in) != expected.end();
    }
    if (tie) {
      continue;
    }
    Runtime rt(single("heartbeat", {{"timeout", timeout}}), builtin_registry());
    for (auto t : inputs) {
      rt.inject_at(t, "n", msg(1));
    }
    rt.run_until(t_end);
    CHECK(times(out(rt.log(), 2)) == expected);
    CHECK(out(rt.log(), 1).size() == inputs.size());
  }
}
