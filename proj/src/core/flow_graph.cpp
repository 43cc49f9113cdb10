#include "selfheal/core/flow_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace selfheal {

namespace {

bool is_integral(const Payload& v) {
  if (v.is_number_integer()) {
    return true;
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    return std::isfinite(d) && std::floor(d) == d;
  }
  return false;
}

bool type_matches(ConfigType type, const Payload& v) {
  auto all = [&](auto pred) {
    return v.is_array() && std::all_of(v.begin(), v.end(), pred);
  };
  switch (type) {
    case ConfigType::Number:
      return v.is_number();
    case ConfigType::Integer:
      return is_integral(v);
    case ConfigType::Duration:
      return is_integral(v) && v.get<double>() >= 0;
    case ConfigType::String:
      return v.is_string();
    case ConfigType::Bool:
      return v.is_boolean();
    case ConfigType::Any:
      return true;
    case ConfigType::NumberList:
      return all([](const Payload& e) { return e.is_number(); });
    case ConfigType::IntegerList:
      return all([](const Payload& e) { return is_integral(e); });
    case ConfigType::StringList:
      return all([](const Payload& e) { return e.is_string(); });
  }
  return false;
}

std::string_view type_name(ConfigType type) {
  switch (type) {
    case ConfigType::Number: return "number";
    case ConfigType::Integer: return "integer";
    case ConfigType::Duration: return "duration (integer ms)";
    case ConfigType::String: return "string";
    case ConfigType::Bool: return "bool";
    case ConfigType::Any: return "any";
    case ConfigType::NumberList: return "list of numbers";
    case ConfigType::IntegerList: return "list of integers";
    case ConfigType::StringList: return "list of strings";
  }
  return "?";
}

std::string wire_locus(const Wire& w) {
  return w.from.node + "[" + std::to_string(w.from.port) + "]->" + w.to.node + "[" + std::to_string(w.to.port) + "]";
}

}  // namespace

const NodeDef* FlowGraph::find(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) {
      return &n;
    }
  }
  return nullptr;
}

std::vector<const Wire*> FlowGraph::wires_from(std::string_view node, int port) const {
  std::vector<const Wire*> out;
  for (const auto& w : wires) {
    if (w.from.node == node && w.from.port == port) {
      out.push_back(&w);
    }
  }
  return out;
}

std::string to_string(const Diagnostic& d) {
  return std::string(d.severity == Severity::Error ? "error" : "warning") + " [" + d.code + "] " + d.locus + ": " +
         d.message;
}

Payload with_defaults(const NodeSpec& spec, const Payload& config) {
  Payload out = config.is_object() ? config : Payload::object();
  for (const auto& field : spec.config) {
    if (!out.contains(field.key) && field.default_value) {
      out[field.key] = *field.default_value;
    }
  }
  return out;
}

FlowGraph parse_flow(std::string_view text, const NodeRegistry& registry) {
  Payload doc;
  try {
    doc = Payload::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FlowError(FlowError::Code::Syntax, "flow syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  auto structure = [](const std::string& what) { return FlowError(FlowError::Code::Structure, "flow: " + what); };

  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw structure("document must be an object with a \"nodes\" array");
  }
  for (const auto& [key, v] : doc.items()) {
    if (key != "nodes") {
      throw structure("unknown top-level key \"" + key + "\"");
    }
  }

  FlowGraph graph;
  std::set<std::string> ids;
  std::vector<std::pair<std::string, Payload>> pending_wires;
  std::size_t index = 0;
  for (const auto& raw : doc["nodes"]) {
    const std::string where = "nodes[" + std::to_string(index++) + "]";
    if (!raw.is_object()) {
      throw structure(where + " must be an object");
    }
    for (const auto& [key, v] : raw.items()) {
      static const std::set<std::string> allowed{"id", "type", "flow", "config", "wires", "enabled"};
      if (!allowed.contains(key)) {
        throw structure(where + ": unknown key \"" + key + "\"");
      }
    }
    if (!raw.contains("id") || !raw["id"].is_string() || raw["id"].get<std::string>().empty()) {
      throw structure(where + ": \"id\" must be a non-empty string");
    }
    if (!raw.contains("type") || !raw["type"].is_string()) {
      throw structure(where + ": \"type\" must be a string");
    }
    NodeDef def;
    def.id = raw["id"].get<std::string>();
    def.kind = raw["type"].get<std::string>();
    const NodeSpec* spec = registry.find(def.kind);
    if (!spec) {
      throw FlowError(FlowError::Code::UnknownKind, "flow: node \"" + def.id + "\" has unknown type \"" + def.kind + "\"");
    }
    if (!ids.insert(def.id).second) {
      throw FlowError(FlowError::Code::DuplicateId, "flow: duplicate node id \"" + def.id + "\"");
    }
    if (raw.contains("flow")) {
      if (!raw["flow"].is_string() || raw["flow"].get<std::string>().empty()) {
        throw structure(where + ": \"flow\" must be a non-empty string");
      }
      def.flow = raw["flow"].get<std::string>();
    }
    if (raw.contains("enabled")) {
      if (!raw["enabled"].is_boolean()) {
        throw structure(where + ": \"enabled\" must be a bool");
      }
      def.enabled = raw["enabled"].get<bool>();
    }
    if (raw.contains("config")) {
      if (!raw["config"].is_object()) {
        throw structure(where + ": \"config\" must be an object");
      }
      def.config = raw["config"];
    }
    def.config = with_defaults(*spec, def.config);
    if (raw.contains("wires")) {
      pending_wires.emplace_back(def.id, raw["wires"]);
    }
    graph.nodes.push_back(std::move(def));
  }

  for (const auto& [from, wires] : pending_wires) {
    if (!wires.is_array()) {
      throw structure("node \"" + from + "\": \"wires\" must be an array of arrays");
    }
    for (std::size_t egress = 0; egress < wires.size(); ++egress) {
      const auto& targets = wires[egress];
      if (!targets.is_array()) {
        throw structure("node \"" + from + "\": wires[" + std::to_string(egress) + "] must be an array");
      }
      for (const auto& t : targets) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_string() || !t[1].is_number_integer()) {
          throw structure("node \"" + from + "\": each wire target must be [\"nodeId\", ingressIndex]");
        }
        std::string to = t[0].get<std::string>();
        if (!ids.contains(to)) {
          throw FlowError(FlowError::Code::DanglingWire,
                          "flow: dangling wire from \"" + from + "\" to missing node \"" + to + "\"");
        }
        graph.wires.push_back(Wire{{from, static_cast<int>(egress)}, {to, t[1].get<int>()}});
      }
    }
  }
  return graph;
}

std::vector<Diagnostic> validate_graph(const FlowGraph& graph, const NodeRegistry& registry) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string locus, std::string code, std::string message) {
    out.push_back(Diagnostic{Severity::Error, std::move(locus), std::move(code), std::move(message)});
  };

  std::map<std::string, const NodeDef*> by_id;
  for (const auto& n : graph.nodes) {
    if (!by_id.emplace(n.id, &n).second) {
      error(n.id, "duplicate-id", "node id is not unique");
    }
    const NodeSpec* spec = registry.find(n.kind);
    if (!spec) {
      error(n.id, "unknown-kind", "unknown node type \"" + n.kind + "\"");
      continue;
    }
    if (!n.config.is_object()) {
      error(n.id, "config-type", "config must be an object");
      continue;
    }
    bool types_ok = true;
    for (const auto& [key, value] : n.config.items()) {
      auto field = std::find_if(spec->config.begin(), spec->config.end(),
                                [&](const ConfigField& f) { return f.key == key; });
      if (field == spec->config.end()) {
        error(n.id, "unknown-config", "unknown config key \"" + key + "\" for " + n.kind);
        continue;
      }
      if (!type_matches(field->type, value)) {
        types_ok = false;
        error(n.id, "config-type", "config \"" + key + "\" must be " + std::string(type_name(field->type)));
      }
    }
    for (const auto& field : spec->config) {
      if (!n.config.contains(field.key) && !field.default_value && !field.optional) {
        types_ok = false;
        error(n.id, "missing-config", "required config \"" + field.key + "\" is missing");
      }
    }
    if (types_ok && spec->check) {
      std::vector<std::string> problems;
      spec->check(with_defaults(*spec, n.config), problems);
      for (auto& p : problems) {
        error(n.id, "invariant", std::move(p));
      }
    }
  }

  std::map<std::string, std::vector<std::string>> edges;
  for (const auto& w : graph.wires) {
    auto from = by_id.find(w.from.node);
    auto to = by_id.find(w.to.node);
    if (from == by_id.end() || to == by_id.end()) {
      error(wire_locus(w), "dangling-wire", "wire references a missing node");
      continue;
    }
    const NodeSpec* fs = registry.find(from->second->kind);
    const NodeSpec* ts = registry.find(to->second->kind);
    if (fs) {
      int egress = fs->egress_count(with_defaults(*fs, from->second->config));
      if (w.from.port < 0 || w.from.port >= egress) {
        error(wire_locus(w), "bad-port",
              "egress " + std::to_string(w.from.port) + " out of range (" + std::to_string(egress) + " egresses)");
      }
    }
    if (ts && (w.to.port < 0 || w.to.port >= ts->ingress)) {
      error(wire_locus(w), "bad-port",
            "ingress " + std::to_string(w.to.port) + " out of range (" + std::to_string(ts->ingress) + " ingresses)");
    }
    edges[w.from.node].push_back(w.to.node);
  }

  // Kahn's algorithm; anything left over sits on or behind a cycle.
  std::map<std::string, int> indegree;
  for (const auto& [id, def] : by_id) {
    indegree[id] = 0;
  }
  for (const auto& [from, tos] : edges) {
    for (const auto& to : tos) {
      if (indegree.contains(to) && indegree.contains(from)) {
        ++indegree[to];
      }
    }
  }
  std::vector<std::string> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) {
      ready.push_back(id);
    }
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    std::string id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& to : edges[id]) {
      if (indegree.contains(to) && --indegree[to] == 0) {
        ready.push_back(to);
      }
    }
  }
  if (visited < indegree.size()) {
    // Peel off nodes downstream of the cycle so only its members are named.
    std::set<std::string> remaining;
    for (const auto& [id, deg] : indegree) {
      if (deg > 0) {
        remaining.insert(id);
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = remaining.begin(); it != remaining.end();) {
        const auto& outs = edges[*it];
        bool feeds_remaining =
            std::any_of(outs.begin(), outs.end(), [&](const std::string& to) { return remaining.contains(to); });
        if (!feeds_remaining) {
          it = remaining.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    std::string members;
    for (const auto& id : remaining) {
      members += (members.empty() ? "" : ", ") + id;
    }
    std::string locus = members.substr(0, members.find(','));
    error(locus, "cycle", "graph contains a cycle through: " + members);
  }
  return out;
}

std::string to_json(const FlowGraph& graph) {
  Payload doc{{"nodes", Payload::array()}};
  for (const auto& n : graph.nodes) {
    Payload node{{"id", n.id}, {"type", n.kind}, {"flow", n.flow}, {"config", n.config}};
    if (!n.enabled) {
      node["enabled"] = false;
    }
    Payload wires = Payload::array();
    for (const auto& w : graph.wires) {
      if (w.from.node != n.id || w.from.port < 0) {
        continue;
      }
      while (wires.size() <= static_cast<std::size_t>(w.from.port)) {
        wires.push_back(Payload::array());
      }
      wires[static_cast<std::size_t>(w.from.port)].push_back(Payload::array({w.to.node, w.to.port}));
    }
    node["wires"] = wires;
    doc["nodes"].push_back(std::move(node));
  }
  return doc.dump(2);
}

}  // namespace selfheal
