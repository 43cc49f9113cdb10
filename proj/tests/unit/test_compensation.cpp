#include "doctest.h"
#include "harness.hpp"
#include "oracles.hpp"
#include "selfheal/nodes/compensation.hpp"

#include <cmath>

using namespace selfheal;
using namespace selfheal::nodes;
using harness::msg;
using harness::out;
using harness::single;
using harness::times;
using harness::values;

TEST_CASE("compensate substitutes last value each interval of silence") {
  Runtime rt(single("compensate", {{"interval", 60000}}), builtin_registry());
  rt.inject_at(10000, "n", msg(21.0));
  rt.inject_at(20000, "n", msg(22.5));
  rt.run_until(200000);
  auto emitted = out(rt.log(), 0);
  CHECK(times(emitted) == std::vector<TimeMs>{10000, 20000, 80000, 140000, 200000});
  CHECK(values(emitted) == std::vector<Payload>{21.0, 22.5, 22.5, 22.5, 22.5});
  auto records = values(out(rt.log(), 1));
  REQUIRE(records.size() == 5);
  CHECK(records[1]["substituted"] == false);
  CHECK(records[1]["confidence"] == 1.0);
  CHECK(records[2]["substituted"] == true);
  CHECK(records[2]["confidence"].get<double>() == doctest::Approx(0.9));
  CHECK(records[4]["confidence"].get<double>() == doctest::Approx(0.729));
}

TEST_CASE("compensate with no history reports an error and keeps waiting") {
  Runtime rt(single("compensate", {{"interval", 1000}}), builtin_registry());
  rt.run_until(2500);
  CHECK(times(out(rt.log(), 2)) == std::vector<TimeMs>{1000, 2000});
  CHECK(out(rt.log(), 0).empty());
  rt.inject_at(2600, "n", msg(5));
  rt.run_until(3600);
  CHECK(times(out(rt.log(), 0)) == std::vector<TimeMs>{2600, 3600});
}

TEST_CASE("compensate feeds substitutes back into the history") {
  CompensateState s(CompensateConfig{3, 1000, Aggregate::Avg, 0.9});
  s.accept(0.0);
  s.accept(3.0);
  s.accept(6.0);
  CHECK(s.substitute().value.get<double>() == doctest::Approx(3.0));   // {0,3,6}
  CHECK(s.substitute().value.get<double>() == doctest::Approx(4.0));   // {3,6,3}
  CHECK(s.substitute().value.get<double>() == doctest::Approx(13.0 / 3));  // {6,3,4}
}

TEST_CASE("compensate substitutes agree with the replay oracle") {
  Rng rng(31);
  const std::vector<std::pair<std::string, Aggregate>> strategies{
      {"last", Aggregate::Last}, {"avg", Aggregate::Avg}, {"max", Aggregate::Max}, {"min", Aggregate::Min}};
  for (int trial = 0; trial < 200; ++trial) {
    const auto& [name, agg] = strategies[rng.below(strategies.size())];
    const std::size_t cap = 2 + rng.below(8);
    std::vector<double> readings;
    const auto n = 1 + rng.below(15);
    for (std::size_t i = 0; i < n; ++i) {
      readings.push_back(rng.uniform(-10, 40));
    }
    const int timeouts = 1 + static_cast<int>(rng.below(8));
    CompensateState s(CompensateConfig{cap, 1000, agg, 0.9});
    for (double r : readings) {
      s.accept(r);
    }
    auto expected = oracle::compensate_replay(readings, cap, name, timeouts);
    double confidence = 1.0;
    for (int i = 0; i < timeouts; ++i) {
      auto v = s.substitute();
      confidence *= 0.9;
      CHECK(v.value.get<double>() == doctest::Approx(expected[i]).epsilon(1e-12));
      CHECK(v.confidence == doctest::Approx(confidence));
      CHECK(v.substituted);
    }
    CHECK(s.history().size() == std::min(cap, n + timeouts));
  }
}

TEST_CASE("confidence decays geometrically and resets on a real reading") {
  CompensateState s(CompensateConfig{10, 1000, Aggregate::Last, 0.5});
  s.accept(1);
  for (int k = 1; k <= 6; ++k) {
    CHECK(s.substitute().confidence == doctest::Approx(std::pow(0.5, k)));
  }
  CHECK(s.accept(2).confidence == 1.0);
  CHECK(s.substitute().confidence == 0.5);
}

TEST_CASE("compensate config validation") {
  CHECK(harness::invalid(single("compensate", {{"interval", 0}})));
  CHECK(harness::invalid(single("compensate", {{"interval", 10}, {"historyMaxSize", 1}})));
  CHECK(harness::invalid(single("compensate", {{"interval", 10}, {"strategy", "median"}})));
  CHECK(harness::invalid(single("compensate", {{"interval", 10}, {"confidenceDecay", 1.5}})));
}

TEST_CASE("checkpoint init replays once within the time to live") {
  persistence::Store store;
  store.store_checkpoint("ck", Message{"lab", 21.5, std::nullopt}, 100000);
  auto replay = checkpoint_init(store, "ck", 400000, 300000);  // exactly ttl old
  REQUIRE(replay);
  CHECK(replay->payload == 21.5);
  CHECK(replay->topic == "lab");
  CHECK_FALSE(checkpoint_init(store, "ck", 400000, 300000).has_value());  // slot cleared
}

TEST_CASE("checkpoint init discards stale records") {
  persistence::Store store;
  store.store_checkpoint("ck", Message{"lab", 21.5, std::nullopt}, 100000);
  CHECK_FALSE(checkpoint_init(store, "ck", 400001, 300000).has_value());
  CHECK_FALSE(checkpoint_init(store, "missing", 0, 300000).has_value());
}

TEST_CASE("checkpoint node persists, forwards and replays after restart") {
  Runtime rt(single("checkpoint", {{"timeToLive", 300000}}), builtin_registry());
  rt.inject_at(100000, "n", msg(7, "lab/x"));
  rt.run_until(150000);
  CHECK(out(rt.log(), 0).size() == 1);
  CHECK(rt.store().load_checkpoint("n")->timestamp == 100000);
  rt.restart();
  auto emitted = out(rt.log(), 0);
  REQUIRE(emitted.size() == 2);
  CHECK(emitted[1].time == 150000);
  CHECK(emitted[1].topic == "lab/x");
  rt.restart();
  CHECK(out(rt.log(), 0).size() == 2);  // replayed only once
}

TEST_CASE("checkpoint persistence failure is reported but the message still flows") {
  Runtime rt(single("checkpoint", {{"timeToLive", 1000}}), builtin_registry());
  rt.store().fail_writes(true);
  rt.engine().inject("n", msg(1));
  CHECK(out(rt.log(), 0).size() == 1);
  CHECK(harness::select(rt.log(), EventKind::Error, "n").size() == 1);
}

TEST_CASE("kalman filter matches the oracle") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const double q = rng.uniform(0, 0.5);
    const double r = rng.uniform(0.01, 5);
    std::vector<double> zs;
    for (int i = 0; i < 60; ++i) {
      zs.push_back(20 + rng.uniform(-3, 3));
    }
    ScalarKalman f(KalmanConfig{q, r});
    auto expected = oracle::kalman(zs, q, r);
    for (std::size_t i = 0; i < zs.size(); ++i) {
      f.update(zs[i]);
      CHECK(std::abs(f.estimate() - expected[i].x) <= 1e-12);
      CHECK(std::abs(f.variance() - expected[i].p) <= 1e-12);
      CHECK(std::abs(f.last_gain() - expected[i].k) <= 1e-12);
    }
  }
}

TEST_CASE("kalman properties: gain in (0,1), estimate within the measurement hull") {
  Rng rng(43);
  ScalarKalman f(KalmanConfig{});
  double lo = 1e9;
  double hi = -1e9;
  double prev_p = 1e9;
  for (int i = 0; i < 500; ++i) {
    const double z = rng.uniform(-5, 5);
    lo = std::min(lo, z);
    hi = std::max(hi, z);
    f.update(z);
    CHECK(f.last_gain() > 0);
    CHECK(f.last_gain() < 1);
    CHECK(f.estimate() >= lo - 1e-9);
    CHECK(f.estimate() <= hi + 1e-9);
    CHECK(f.variance() <= prev_p + 1e-15);  // posterior variance settles monotonically from r
    prev_p = f.variance();
  }
}

TEST_CASE("kalman on a constant signal is the constant") {
  ScalarKalman f(KalmanConfig{0.01, 1});
  for (int i = 0; i < 20; ++i) {
    CHECK(f.update(4.25) == 4.25);
  }
}

TEST_CASE("kalman node rejects non-numeric input") {
  Runtime rt(single("kalman-filter"), builtin_registry());
  rt.engine().inject("n", msg(3));
  rt.engine().inject("n", msg("x"));
  CHECK(values(out(rt.log(), 0)) == std::vector<Payload>{3.0});
  CHECK(out(rt.log(), 1).size() == 1);
}

TEST_CASE("vote agrees with brute-force majority for small inputs") {
  for (std::size_t n = 1; n <= 5; ++n) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) {
      combos *= 3;
    }
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<int> ints;
      std::vector<Payload> ps;
      std::size_t x = c;
      for (std::size_t i = 0; i < n; ++i) {
        ints.push_back(static_cast<int>(x % 3));
        ps.emplace_back(static_cast<int>(x % 3));
        x /= 3;
      }
      auto got = vote(ps, Quorum::Majority).winner;
      auto want = oracle::majority(ints);
      REQUIRE(got.has_value() == want.has_value());
      if (want) {
        CHECK(got->get<int>() == *want);
      }
    }
  }
  CHECK_FALSE(vote({}, Quorum::Majority).winner.has_value());
}

TEST_CASE("unanimity") {
  std::vector<Payload> same{1, 1, 1};
  std::vector<Payload> mixed{1, 1, 2};
  CHECK(vote(same, Quorum::Unanimity).winner == Payload(1));
  CHECK_FALSE(vote(mixed, Quorum::Unanimity).winner.has_value());
}

TEST_CASE("voter node: array payloads, expected count and window close") {
  Runtime rt(single("replication-voter", {{"expected", 3}, {"window", 1000}}), builtin_registry());
  rt.engine().inject("n", msg(Payload::array({4, 4, 5})));
  CHECK(values(out(rt.log(), 0)) == std::vector<Payload>{4});

  rt.inject_at(100, "n", msg(7));
  rt.inject_at(200, "n", msg(7));
  rt.inject_at(300, "n", msg(8));
  rt.run_until(500);
  CHECK(values(out(rt.log(), 0)) == std::vector<Payload>{4, 7});

  rt.inject_at(600, "n", msg(1));
  rt.inject_at(700, "n", msg(2));
  rt.run_until(2000);
  auto failed = out(rt.log(), 1);
  REQUIRE(failed.size() == 1);
  CHECK(failed[0].time == 1600);
  CHECK(Payload::parse(failed[0].value)["received"] == 2);
}
