#include "doctest.h"
#include "selfheal/core/random.hpp"
#include "selfheal/persistence/store.hpp"

#include <filesystem>
#include <fstream>

using namespace selfheal;
using persistence::DeviceStatus;
using persistence::RegistryEntry;
using persistence::Store;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "selfheal-store-tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

Message msg(Payload p) { return Message{"lab/temp", std::move(p), std::nullopt}; }

}  // namespace

TEST_CASE("checkpoint slots") {
  Store s;
  CHECK_FALSE(s.load_checkpoint("ck").has_value());
  s.store_checkpoint("ck", msg(21.5), 100000);
  auto rec = s.load_checkpoint("ck");
  REQUIRE(rec);
  CHECK(rec->timestamp == 100000);
  CHECK(rec->last_message.payload == 21.5);
  CHECK(rec->last_message.topic == "lab/temp");
  s.store_checkpoint("ck", msg(22.0), 160000);
  CHECK(s.load_checkpoint("ck")->last_message.payload == 22.0);
  s.clear_checkpoint("ck");
  CHECK_FALSE(s.load_checkpoint("ck").has_value());
  CHECK_FALSE(s.load_checkpoint("other").has_value());
}

TEST_CASE("store lines follow the documented format") {
  Store s;
  s.store_checkpoint("ck", msg(21.5), 100000);
  s.registry_upsert({"sensor-node-1", "device", "192.168.1.31", 5000, DeviceStatus::Online});
  REQUIRE(s.lines().size() == 2);
  CHECK(s.lines()[0] == R"(CKPT ck 100000 {"payload":21.5,"topic":"lab/temp"})");
  CHECK(s.lines()[1] == "REG sensor-node-1 device 192.168.1.31 5000 online");
}

TEST_CASE("corrupt records read as empty and are reported") {
  auto s = Store::from_text("CKPT ck 100 {not json\nREG a b\nWAT\nCKPT ok 5 {\"topic\":\"t\",\"payload\":1}\n");
  CHECK_FALSE(s.load_checkpoint("ck").has_value());
  CHECK(s.load_checkpoint("ok")->last_message.payload == 1);
  CHECK(s.diagnostics().size() == 3);
  CHECK(s.registry_list().empty());
}

TEST_CASE("registry upsert, mark lost, list") {
  Store s;
  CHECK(s.registry_list().empty());
  s.registry_upsert({"b", "device", "10.0.0.2", 100, DeviceStatus::Online});
  s.registry_upsert({"a", "device", "10.0.0.1", 200, DeviceStatus::Online});
  s.registry_upsert({"b", "device", "10.0.0.2", 300, DeviceStatus::Online});
  auto list = s.registry_list();
  REQUIRE(list.size() == 2);
  CHECK(list[0].device_id == "a");
  CHECK(list[1].last_seen == 300);
  auto lost = s.registry_mark_lost("b", 400);
  CHECK(lost.status == DeviceStatus::Lost);
  CHECK(lost.last_seen == 300);
  auto back = s.registry_upsert({"b", "device", "10.0.0.2", 500, DeviceStatus::Online});
  CHECK(back.status == DeviceStatus::Online);
  CHECK_THROWS_AS(s.registry_mark_lost("zzz", 1), persistence::StoreError);
}

TEST_CASE("lastSeen never moves backwards") {
  Store s;
  s.registry_upsert({"a", "device", "e", 500, DeviceStatus::Online});
  CHECK(s.registry_upsert({"a", "device", "e", 100, DeviceStatus::Online}).last_seen == 500);
}

TEST_CASE("injected write failure leaves the store unchanged") {
  Store s;
  s.store_checkpoint("ck", msg(1), 10);
  s.fail_writes(true);
  CHECK_THROWS_AS(s.store_checkpoint("ck", msg(2), 20), persistence::StoreError);
  CHECK(s.load_checkpoint("ck")->last_message.payload == 1);
  s.fail_writes(false);
  s.store_checkpoint("ck", msg(3), 30);
  CHECK(s.load_checkpoint("ck")->last_message.payload == 3);
}

TEST_CASE("tokens with whitespace are rejected") {
  Store s;
  CHECK_THROWS_AS(s.store_checkpoint("my node", msg(1), 1), persistence::StoreError);
}

TEST_CASE("file-backed store survives reopening, including compaction") {
  auto path = temp_file("reopen.store");
  {
    auto s = Store::open(path);
    for (int i = 0; i < 200; ++i) {
      s.store_checkpoint("ck", msg(i), i * 10);
      s.registry_upsert({"dev", "device", "10.0.0.9", i, DeviceStatus::Online});
    }
    s.store_checkpoint("gone", msg("x"), 5);
    s.clear_checkpoint("gone");
    CHECK(s.lines().size() <= 2 * 3 + 16);
  }
  auto s = Store::open(path);
  CHECK(s.load_checkpoint("ck")->last_message.payload == 199);
  CHECK(s.load_checkpoint("ck")->timestamp == 1990);
  CHECK_FALSE(s.load_checkpoint("gone").has_value());
  CHECK(s.registry_find("dev")->last_seen == 199);
  CHECK(s.diagnostics().empty());
}

TEST_CASE("replaying the backing text reproduces the state (random operation sequences)") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Store s;
    for (int i = 0; i < 120; ++i) {
      const std::string node = "n" + std::to_string(rng.below(4));
      switch (rng.below(4)) {
        case 0:
        case 1:
          s.store_checkpoint(node, msg(static_cast<int>(rng.below(100))), i);
          break;
        case 2:
          s.clear_checkpoint(node);
          break;
        default:
          s.registry_upsert({node, "device", "ep", i, DeviceStatus::Online});
      }
    }
    auto copy = Store::from_text(s.text());
    for (int n = 0; n < 4; ++n) {
      const std::string node = "n" + std::to_string(n);
      auto a = s.load_checkpoint(node);
      auto b = copy.load_checkpoint(node);
      REQUIRE(a.has_value() == b.has_value());
      if (a) {
        CHECK(a->timestamp == b->timestamp);
        CHECK(a->last_message.payload == b->last_message.payload);
      }
    }
    CHECK(s.registry_list() == copy.registry_list());
  }
}
