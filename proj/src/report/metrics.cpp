#include "selfheal/report/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "selfheal/core/engine.hpp"

namespace selfheal::report {
namespace {

bool is_service_delivery(const LogEntry& e) {
  return e.kind == EventKind::Deliver && e.node.rfind(kServicePrefix, 0) == 0;
}

/// The sink topic is the source topic or one of its subtopics.
bool same_stream(const std::string& source, const std::string& sink) {
  return sink == source || (sink.size() > source.size() && sink.compare(0, source.size(), source) == 0 &&
                            sink[source.size()] == '/');
}

bool is_fault(const LogEntry& e, std::string_view kind) { return e.kind == EventKind::Fault && e.topic == kind; }

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string stats_lines(const std::string& unit, std::span<const double> values) {
  auto s = summarize(values);
  if (!s) {
    return "mean_" + unit + ": n/a\nstddev_" + unit + ": n/a\n";
  }
  return "mean_" + unit + ": " + fixed(s->mean) + "\nstddev_" + unit + ": " + fixed(s->stddev) + "\n";
}

}  // namespace

std::optional<Stats> summarize(std::span<const double> values) {
  if (values.empty()) {
    return std::nullopt;
  }
  Stats s;
  s.n = values.size();
  double sum = 0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0;
    for (double v : values) {
      sq += (v - s.mean) * (v - s.mean);
    }
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

std::vector<MttrSample> mttr_samples(const TimelineLog& log) {
  const auto& entries = log.entries();
  bool has_roles = false;
  for (const auto& e : entries) {
    has_roles = has_roles || e.kind == EventKind::RoleChange;
  }
  std::map<std::string, bool> master;
  std::vector<MttrSample> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.kind == EventKind::RoleChange) {
      auto detail = Payload::parse(e.value, nullptr, false);
      master[e.instance] = detail.is_object() && detail.value("role", "") == "master";
      continue;
    }
    if (!is_fault(e, "instance_crash")) {
      continue;
    }
    const std::string crashed = e.node;
    const bool was_master = has_roles ? master[crashed] : true;
    master[crashed] = false;
    if (!was_master) {
      continue;
    }
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const auto& r = entries[j];
      if (is_service_delivery(r) && r.instance != crashed) {
        out.push_back(MttrSample{crashed, e.time, r.instance, r.time});
        break;
      }
    }
  }
  return out;
}

std::vector<SourceLoss> loss_by_source(const TimelineLog& log) {
  const auto& entries = log.entries();
  std::map<std::string, std::size_t> index;
  std::vector<SourceLoss> out;
  std::map<std::string, std::vector<TimeMs>> emits;
  for (const auto& e : entries) {
    if (e.kind != EventKind::Emit || e.instance != "world") {
      continue;
    }
    auto [it, fresh] = index.emplace(e.node, out.size());
    if (fresh) {
      out.push_back(SourceLoss{e.node, e.topic, 0, 0});
    }
    emits[e.node].push_back(e.time);
  }
  for (auto& s : out) {
    const auto& times = emits[s.source];
    std::vector<TimeMs> sinks;
    for (const auto& e : entries) {
      if (is_service_delivery(e) && same_stream(s.topic, e.topic)) {
        sinks.push_back(e.time);
      }
    }
    s.expected = times.size();
    for (std::size_t k = 0; k < times.size(); ++k) {
      const TimeMs from = times[k];
      const bool bounded = k + 1 < times.size();
      const TimeMs to = bounded ? times[k + 1] : 0;
      auto it = std::lower_bound(sinks.begin(), sinks.end(), from);
      if (it != sinks.end() && (!bounded || *it < to)) {
        ++s.delivered;
      }
    }
  }
  return out;
}

RunReport build_report(const TimelineLog& log, std::optional<TimeMs> until) {
  RunReport r;
  TimeMs end = until.value_or(0);
  std::set<std::string> instances;
  for (const auto& e : log.entries()) {
    end = std::max(end, e.time);
    if (is_service_delivery(e)) {
      ++r.delivered_per_sink[e.node.substr(kServicePrefix.size())];
    }
    if (e.instance != "world") {
      instances.insert(e.instance);
    }
  }
  for (const auto& s : loss_by_source(log)) {
    r.lost += s.lost();
  }
  for (const auto& m : mttr_samples(log)) {
    r.mttr_samples.push_back(m.mttr());
  }
  for (const auto& inst : instances) {
    TimeMs up = 0;
    TimeMs since = 0;
    bool running = true;
    for (const auto& e : log.entries()) {
      if (e.node != inst) {
        continue;
      }
      if (is_fault(e, "instance_crash") && running) {
        up += e.time - since;
        running = false;
      } else if (is_fault(e, "instance_restart") && !running) {
        since = e.time;
        running = true;
      }
    }
    if (running) {
      up += end - since;
    }
    r.uptime[inst] = up;
  }
  return r;
}

std::string format_mttr(const TimelineLog& log) {
  const auto samples = mttr_samples(log);
  std::string out = "metric: mttr\nsamples: " + std::to_string(samples.size()) + "\n";
  std::vector<double> values;
  for (const auto& s : samples) {
    out += "failover " + s.crashed + " crash_ms " + std::to_string(s.crash_at) + " fallback " + s.fallback +
           " recovered_ms " + std::to_string(s.recovered_at) + " mttr_ms " + std::to_string(s.mttr()) + "\n";
    values.push_back(static_cast<double>(s.mttr()));
  }
  return out + stats_lines("ms", values);
}

std::string format_loss(const TimelineLog& log) {
  const auto sources = loss_by_source(log);
  std::string out = "metric: loss\nsources: " + std::to_string(sources.size()) + "\n";
  std::vector<double> values;
  for (const auto& s : sources) {
    out += "source " + s.source + " topic " + s.topic + " expected " + std::to_string(s.expected) + " delivered " +
           std::to_string(s.delivered) + " lost " + std::to_string(s.lost()) + "\n";
    values.push_back(static_cast<double>(s.lost()));
  }
  return out + stats_lines("lost", values);
}

std::string format_summary(const RunReport& report) {
  std::string out;
  for (const auto& [sink, n] : report.delivered_per_sink) {
    out += "delivered " + sink + " " + std::to_string(n) + "\n";
  }
  out += "lost " + std::to_string(report.lost) + "\n";
  std::vector<double> values(report.mttr_samples.begin(), report.mttr_samples.end());
  out += "failovers " + std::to_string(values.size()) + "\n" + stats_lines("mttr_ms", values);
  for (const auto& [inst, up] : report.uptime) {
    out += "uptime " + inst + " " + std::to_string(up) + "\n";
  }
  return out;
}

}  // namespace selfheal::report
