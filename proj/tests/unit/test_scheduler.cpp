#include "doctest.h"
#include "selfheal/core/random.hpp"
#include "selfheal/core/scheduler.hpp"

#include <vector>

using namespace selfheal;

TEST_CASE("events fire in (time, creation order)") {
  Scheduler s;
  std::vector<int> order;
  s.schedule_at(20, [&] { order.push_back(3); });
  s.schedule_at(10, [&] { order.push_back(1); });
  s.schedule_at(10, [&] { order.push_back(2); });
  s.run_until(100);
  CHECK(order == std::vector<int>{1, 2, 3});
  CHECK(s.now() == 100);
}

TEST_CASE("equal-time timers created later in a callback still fire after earlier ones") {
  Scheduler s;
  std::vector<int> order;
  s.schedule_at(5, [&] {
    order.push_back(1);
    s.schedule_at(5, [&] { order.push_back(3); });
  });
  s.schedule_at(5, [&] { order.push_back(2); });
  s.run_until(5);
  CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("run_until stops at t_end inclusive and leaves later events pending") {
  Scheduler s;
  int fired = 0;
  s.schedule_at(1000, [&] { ++fired; });
  s.schedule_at(1001, [&] { ++fired; });
  s.run_until(1000);
  CHECK(fired == 1);
  CHECK(s.pending() == 1);
  CHECK(s.next_time() == 1001);
}

TEST_CASE("cancelled events never fire") {
  Scheduler s;
  int fired = 0;
  auto id = s.schedule_at(10, [&] { ++fired; });
  CHECK(s.cancel(id));
  CHECK_FALSE(s.cancel(id));
  s.run_until(20);
  CHECK(fired == 0);
}

TEST_CASE("scheduling in the past is rejected") {
  Scheduler s;
  s.run_until(50);
  CHECK_THROWS_AS(s.schedule_at(49, [] {}), std::invalid_argument);
}

TEST_CASE("clock is monotone under random schedules") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    Scheduler s;
    std::vector<TimeMs> seen;
    for (int i = 0; i < 40; ++i) {
      s.schedule_at(static_cast<TimeMs>(rng.below(1000)), [&] {
        seen.push_back(s.now());
        if (rng.below(3) == 0) {
          s.schedule_after(static_cast<TimeMs>(rng.below(100)), [&] { seen.push_back(s.now()); });
        }
      });
    }
    s.run_until(2000);
    CHECK(std::is_sorted(seen.begin(), seen.end()));
  }
}

TEST_CASE("derived seeds are stable and distinct per name") {
  CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
  CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
  CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform(-1, 1);
    CHECK(x == b.uniform(-1, 1));
    CHECK(x >= -1);
    CHECK(x < 1);
  }
}
