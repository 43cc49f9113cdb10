#include "doctest.h"
#include "selfheal/core/random.hpp"
#include "selfheal/core/rbe.hpp"

#include <vector>

using namespace selfheal;

namespace {

std::vector<Payload> run(ReportByException& rbe, const std::vector<Payload>& in) {
  std::vector<Payload> out;
  for (const auto& p : in) {
    if (auto e = rbe.process(Envelope{0, "t", p, "src", 0, std::nullopt})) {
      out.push_back(e->payload);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("rbe drops sequential repeats") {
  ReportByException rbe;
  CHECK(run(rbe, {5, 5, 7, 7, 5}) == std::vector<Payload>{5, 7, 5});
}

TEST_CASE("rbe passes the first message") {
  ReportByException rbe;
  CHECK(run(rbe, {"hello"}) == std::vector<Payload>{"hello"});
}

TEST_CASE("rbe: identical stream of n gives one emission") {
  for (int n = 1; n < 20; ++n) {
    ReportByException rbe;
    CHECK(run(rbe, std::vector<Payload>(static_cast<std::size_t>(n), Payload{{"role", "standby"}})).size() == 1);
  }
}

TEST_CASE("rbe uses deep equality and numeric value equality") {
  ReportByException rbe;
  CHECK(run(rbe, {Payload{{"a", {1, 2}}}, Payload{{"a", {1, 2}}}, Payload{{"a", {2, 1}}}}).size() == 2);
  ReportByException nums;
  CHECK(run(nums, {1, 1.0}).size() == 1);
}

TEST_CASE("rbe property: output has no adjacent duplicates and keeps every change") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Payload> in;
    for (int i = 0; i < 30; ++i) {
      in.push_back(static_cast<int>(rng.below(3)));
    }
    ReportByException rbe;
    auto out = run(rbe, in);
    std::size_t changes = 1;
    for (std::size_t i = 1; i < in.size(); ++i) {
      changes += in[i] != in[i - 1];
    }
    CHECK(out.size() == changes);
    for (std::size_t i = 1; i < out.size(); ++i) {
      CHECK(out[i] != out[i - 1]);
    }
  }
}
