#include "selfheal/report/marble.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "selfheal/core/engine.hpp"

namespace selfheal::report {

char marble_glyph(int count) {
  if (count <= 0) {
    return '-';
  }
  if (count == 1) {
    return 'o';
  }
  if (count < 10) {
    return static_cast<char>('0' + count);
  }
  return '+';
}

std::string MarbleDiagram::render() const {
  std::size_t width = 0;
  for (const auto& r : rows) {
    width = std::max(width, r.label.size());
  }
  std::string out;
  for (const auto& r : rows) {
    out += r.label;
    out.append(width - r.label.size() + 1, ' ');
    out += '|';
    for (int c : r.counts) {
      out += marble_glyph(c);
    }
    out += "|\n";
  }
  return out;
}

MarbleDiagram build_marble(const TimelineLog& log, TimeMs bucket, const std::vector<std::string>& nodes,
                           const EgressNamer& namer) {
  if (bucket <= 0) {
    throw std::invalid_argument("marble: bucket width must be positive");
  }
  auto is_service = [](const LogEntry& e) {
    return e.kind == EventKind::Deliver && e.node.rfind(kServicePrefix, 0) == 0;
  };
  auto is_row_event = [&](const LogEntry& e) { return e.kind == EventKind::Emit || is_service(e); };

  std::set<std::string> seen_nodes;
  std::set<std::string> instances;
  // Whether a node emitted anywhere but egress 0.
  std::map<std::pair<std::string, std::string>, bool> multi_port;
  TimeMs last = 0;
  for (const auto& e : log.entries()) {
    if (!is_row_event(e)) {
      continue;
    }
    seen_nodes.insert(e.node);
    if (e.kind == EventKind::Emit && e.instance != "world") {
      instances.insert(e.instance);
    }
    if (e.kind == EventKind::Emit && e.port.value_or(0) != 0) {
      multi_port[{e.instance, e.node}] = true;
    }
    last = std::max(last, e.time);
  }
  for (const auto& n : nodes) {
    if (!seen_nodes.count(n)) {
      throw std::invalid_argument("marble: node '" + n + "' does not appear in the timeline");
    }
  }
  const std::set<std::string> filter(nodes.begin(), nodes.end());
  const bool prefix = instances.size() > 1;

  MarbleDiagram d;
  d.bucket = bucket;
  const std::size_t columns = seen_nodes.empty() ? 0 : static_cast<std::size_t>(last / bucket) + 1;
  std::map<std::string, std::size_t> row_of;
  for (const auto& e : log.entries()) {
    if (!is_row_event(e) || (!filter.empty() && !filter.count(e.node))) {
      continue;
    }
    std::string label = e.node;
    if (e.kind == EventKind::Emit) {
      const int port = e.port.value_or(0);
      std::string name = namer ? namer(e.instance, e.node, port) : std::string();
      if (!name.empty()) {
        label += "/" + name;
      } else if (multi_port.count({e.instance, e.node})) {
        label += "/" + std::to_string(port);
      }
    }
    const bool world_side = e.kind == EventKind::Emit && e.instance == "world";
    if (prefix && !world_side) {
      label = e.instance + ":" + label;
    }
    auto [it, fresh] = row_of.emplace(label, d.rows.size());
    if (fresh) {
      d.rows.push_back(MarbleRow{label, std::vector<int>(columns, 0)});
    }
    ++d.rows[it->second].counts[static_cast<std::size_t>(e.time / bucket)];
  }
  return d;
}

}  // namespace selfheal::report
