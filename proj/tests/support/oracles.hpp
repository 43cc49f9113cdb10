#pragma once

// Reference implementations used to check the runtime. Each one is written
// from the operator's definition, directly and without sharing code with
// the library.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

/// Replays the compensate operator over a history of real readings followed
/// by `timeouts` silent intervals. Returns the substitutes in order.
inline std::vector<double> compensate_replay(std::vector<double> history, std::size_t capacity,
                                             const std::string& strategy, int timeouts) {
  std::vector<double> out;
  while (history.size() > capacity) {
    history.erase(history.begin());
  }
  for (int i = 0; i < timeouts; ++i) {
    double v = 0;
    if (strategy == "last") {
      v = history.back();
    } else if (strategy == "avg") {
      double sum = 0;
      for (double h : history) {
        sum += h;
      }
      v = sum / static_cast<double>(history.size());
    } else if (strategy == "max") {
      v = *std::max_element(history.begin(), history.end());
    } else if (strategy == "min") {
      v = *std::min_element(history.begin(), history.end());
    }
    out.push_back(v);
    history.push_back(v);  // the substitute is fed back as an input
    if (history.size() > capacity) {
      history.erase(history.begin());
    }
  }
  return out;
}

struct KalmanStep {
  double x;
  double p;
  double k;
};

/// x0 = z0, P0 = r, then for every measurement (including z0):
/// P += q; K = P / (P + r); x += K (z - x); P = (1 - K) P.
inline std::vector<KalmanStep> kalman(const std::vector<double>& zs, double q, double r) {
  std::vector<KalmanStep> out;
  double x = 0;
  double p = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (i == 0) {
      x = zs[0];
      p = r;
    }
    const double prior = p + q;
    const double k = prior / (prior + r);
    x = x + k * (zs[i] - x);
    p = (1 - k) * prior;
    out.push_back({x, p, k});
  }
  return out;
}

/// Weighted round robin as the expanded cycle [0 x w0, 1 x w1, ...].
inline std::vector<std::size_t> wrr(const std::vector<std::uint32_t>& weights, std::size_t messages) {
  std::vector<std::size_t> cycle;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cycle.insert(cycle.end(), weights[i], i);
  }
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < messages; ++m) {
    out.push_back(cycle[m % cycle.size()]);
  }
  return out;
}

/// Strict majority by counting every symbol.
inline std::optional<int> majority(const std::vector<int>& values) {
  std::map<int, std::size_t> count;
  for (int v : values) {
    ++count[v];
  }
  for (const auto& [v, c] : count) {
    if (2 * c > values.size()) {
      return v;
    }
  }
  return std::nullopt;
}

/// Highest last octet; equal octets resolved by the greater address, compared
/// octet by octet.
inline std::string elect(const std::vector<std::string>& addresses) {
  auto key = [](const std::string& a) {
    std::vector<int> octets;
    std::size_t start = 0;
    while (true) {
      auto dot = a.find('.', start);
      octets.push_back(std::stoi(a.substr(start, dot - start)));
      if (dot == std::string::npos) {
        break;
      }
      start = dot + 1;
    }
    std::vector<int> k{octets.back()};
    k.insert(k.end(), octets.begin(), octets.end());
    return k;
  };
  return *std::max_element(addresses.begin(), addresses.end(),
                           [&](const std::string& x, const std::string& y) { return key(x) < key(y); });
}

/// Heartbeat error instants up to t_end: the timer starts at `start`, every
/// input restarts it, and every expiry emits an error and restarts it.
inline std::vector<std::int64_t> heartbeat_errors(std::int64_t start, std::vector<std::int64_t> inputs,
                                                  std::int64_t timeout, std::int64_t t_end) {
  std::sort(inputs.begin(), inputs.end());
  std::vector<std::int64_t> out;
  std::int64_t deadline = start + timeout;
  std::size_t next = 0;
  while (true) {
    const bool input_first = next < inputs.size() && inputs[next] < deadline;
    if (input_first) {
      deadline = inputs[next++] + timeout;
      continue;
    }
    if (deadline > t_end) {
      break;
    }
    out.push_back(deadline);
    deadline += timeout;
  }
  return out;
}

}  // namespace oracle
