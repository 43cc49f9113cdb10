#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfheal/core/timeline.hpp"

namespace selfheal::report {

struct Stats {
  std::size_t n = 0;
  double mean = 0;
  /// Sample standard deviation (n - 1); 0 for a single sample.
  double stddev = 0;
};

std::optional<Stats> summarize(std::span<const double> values);

/// One failover: the master crashed and another instance later reached an
/// external service.
struct MttrSample {
  std::string crashed;
  TimeMs crash_at = 0;
  std::string fallback;
  TimeMs recovered_at = 0;

  TimeMs mttr() const { return recovered_at - crash_at; }
};

/// Master crashes are instance_crash faults hitting the instance whose last
/// role-change said "master". Logs without any role-change entries treat
/// every crash as a master crash. Crashes nobody recovers from are skipped.
std::vector<MttrSample> mttr_samples(const TimelineLog& log);

/// Readings of one simulated device.
struct SourceLoss {
  std::string source;
  std::string topic;
  std::size_t expected = 0;
  std::size_t delivered = 0;

  std::size_t lost() const { return expected - delivered; }
};

/// A device emission counts as delivered when some external service receives
/// a message on the same topic (or a subtopic of it) before that device's
/// next emission.
std::vector<SourceLoss> loss_by_source(const TimelineLog& log);

struct RunReport {
  std::map<std::string, std::size_t> delivered_per_sink;
  std::size_t lost = 0;
  std::vector<TimeMs> mttr_samples;
  std::map<std::string, TimeMs> uptime;
};

/// Uptime spans [0, until]; without `until`, up to the last log entry.
RunReport build_report(const TimelineLog& log, std::optional<TimeMs> until = std::nullopt);

/// Text reports; "n/a" when the metric has nothing to measure.
std::string format_mttr(const TimelineLog& log);
std::string format_loss(const TimelineLog& log);
std::string format_summary(const RunReport& report);

}  // namespace selfheal::report
