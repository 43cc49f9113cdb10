#include <stdexcept>

#include "selfheal/nodes/common.hpp"

namespace selfheal::nodes {

bool topic_matches(std::string_view filter, std::string_view topic) {
  std::size_t f = 0;
  std::size_t t = 0;
  while (true) {
    std::size_t f_end = filter.find('/', f);
    std::string_view level = filter.substr(f, f_end == std::string_view::npos ? std::string_view::npos : f_end - f);
    if (level == "#") {
      return true;
    }
    if (t > topic.size()) {
      return false;
    }
    std::size_t t_end = topic.find('/', t);
    std::string_view part = topic.substr(t, t_end == std::string_view::npos ? std::string_view::npos : t_end - t);
    if (level != "+" && level != part) {
      return false;
    }
    bool f_last = f_end == std::string_view::npos;
    bool t_last = t_end == std::string_view::npos;
    if (f_last || t_last) {
      return f_last && t_last;
    }
    f = f_end + 1;
    t = t_end + 1;
  }
}

double require_number(const Payload& payload, std::string_view what) {
  auto v = as_number(payload);
  if (!v) {
    throw std::invalid_argument(std::string(what) + ": payload " + compact(payload) + " is not numeric");
  }
  return *v;
}

std::optional<Aggregate> parse_aggregate(std::string_view name) {
  if (name == "last") return Aggregate::Last;
  if (name == "first") return Aggregate::First;
  if (name == "avg") return Aggregate::Avg;
  if (name == "max") return Aggregate::Max;
  if (name == "min") return Aggregate::Min;
  return std::nullopt;
}

Payload aggregate(Aggregate how, std::span<const Payload> values) {
  if (values.empty()) {
    throw std::invalid_argument("aggregate over an empty history");
  }
  switch (how) {
    case Aggregate::Last:
      return values.back();
    case Aggregate::First:
      return values.front();
    case Aggregate::Avg: {
      double sum = 0.0;
      for (const auto& v : values) {
        sum += require_number(v, "avg");
      }
      return sum / static_cast<double>(values.size());
    }
    case Aggregate::Max:
    case Aggregate::Min: {
      double best = require_number(values.front(), "max/min");
      for (const auto& v : values.subspan(1)) {
        double x = require_number(v, "max/min");
        best = how == Aggregate::Max ? std::max(best, x) : std::min(best, x);
      }
      return best;
    }
  }
  throw std::logic_error("unreachable aggregate");
}

}  // namespace selfheal::nodes
