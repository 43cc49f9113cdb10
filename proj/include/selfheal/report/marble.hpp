#pragma once

#include <functional>
#include <string>
#include <vector>

#include "selfheal/core/timeline.hpp"

namespace selfheal::report {

struct MarbleRow {
  std::string label;
  std::vector<int> counts;  // one per bucket
};

struct MarbleDiagram {
  TimeMs bucket = 1000;
  std::vector<MarbleRow> rows;

  /// One line per row: padded label, then one glyph per bucket:
  /// '-' nothing, 'o' one message, '2'..'9' that many, '+' ten or more.
  std::string render() const;
};

char marble_glyph(int count);

/// Resolves an egress label for (node, port), e.g. "tooFast". An empty result
/// leaves the row unsuffixed when the node only ever emitted on egress 0 and
/// falls back to the port number otherwise.
using EgressNamer = std::function<std::string(const std::string& instance, const std::string& node, int port)>;

/// Rows are node emissions (split by egress for multi-egress nodes) and
/// external-service receptions ("service:<name>"), in order of first
/// appearance. `nodes` restricts the rows to those node ids; an id that never
/// appears in the log throws std::invalid_argument. With more than one
/// emitting instance, labels are prefixed with "<instance>:".
MarbleDiagram build_marble(const TimelineLog& log, TimeMs bucket, const std::vector<std::string>& nodes = {},
                           const EgressNamer& namer = {});

}  // namespace selfheal::report
