#include "doctest.h"
#include "selfheal/core/timeline.hpp"

using namespace selfheal;

TEST_CASE("csv header is fixed") {
  TimelineLog log;
  CHECK(log.to_csv() == "time_ms,instance,event,node,port,topic,value\n");
}

TEST_CASE("csv quotes values with commas and quotes and round-trips") {
  TimelineLog log;
  log.append({0, "main", EventKind::Emit, "n1", 0, "lab/temp", "{\"a\":1,\"b\":\"x\"}"});
  log.append({5, "main", EventKind::RoleChange, "red", std::nullopt, "role", "\"master\""});
  log.append({5, "world", EventKind::Fault, "dev", std::nullopt, "device_offline", "{}"});
  const std::string csv = log.to_csv();
  CHECK(csv.find("0,main,emit,n1,0,lab/temp,\"{\"\"a\"\":1,\"\"b\"\":\"\"x\"\"}\"\n") != std::string::npos);
  CHECK(csv.find("5,main,role-change,red,,role,") != std::string::npos);
  auto back = TimelineLog::from_csv(csv);
  CHECK(back.entries() == log.entries());
  CHECK(back.to_csv() == csv);
}

TEST_CASE("append rejects time going backwards") {
  TimelineLog log;
  log.append({10, "main", EventKind::Emit, "n", 0, "", "1"});
  CHECK_THROWS_AS(log.append({9, "main", EventKind::Emit, "n", 0, "", "1"}), std::logic_error);
}

TEST_CASE("malformed csv reports the line") {
  CHECK_THROWS_WITH_AS(TimelineLog::from_csv("time_ms,instance,event,node,port,topic,value\n1,main,bogus,n,0,t,1\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_AS(TimelineLog::from_csv("wrong header\n"), std::runtime_error);
}

TEST_CASE("event kind names") {
  for (auto k : {EventKind::Emit, EventKind::Deliver, EventKind::Drop, EventKind::Fault, EventKind::RoleChange,
                 EventKind::Timer, EventKind::Error}) {
    CHECK(parse_event_kind(to_string(k)) == k);
  }
  CHECK(to_string(EventKind::RoleChange) == "role-change");
}
