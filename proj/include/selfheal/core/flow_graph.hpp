#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selfheal/core/envelope.hpp"
#include "selfheal/core/node.hpp"

namespace selfheal {

inline constexpr std::string_view kDefaultFlow = "main";

struct NodeDef {
  std::string id;
  std::string kind;
  Payload config = Payload::object();
  bool enabled = true;
  std::string flow = std::string(kDefaultFlow);
};

struct PortRef {
  std::string node;
  int port = 0;

  bool operator==(const PortRef&) const = default;
};

struct Wire {
  PortRef from;  // egress
  PortRef to;    // ingress
};

struct FlowGraph {
  std::vector<NodeDef> nodes;
  std::vector<Wire> wires;

  const NodeDef* find(std::string_view id) const;
  /// Wires leaving (node, egress) in declaration order.
  std::vector<const Wire*> wires_from(std::string_view node, int port) const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string locus;  // node id or "from->to" for wires
  std::string code;
  std::string message;
};

std::string to_string(const Diagnostic& d);

class FlowError : public std::runtime_error {
 public:
  enum class Code { Syntax, Structure, UnknownKind, DuplicateId, DanglingWire, Invalid };

  FlowError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Parses a flow definition document:
///
///   {"nodes":[{"id":str,"type":str,"flow":str,"config":{...},
///              "wires":[[["nodeId",ingressIdx],...] per egress]}]}
///
/// Configuration defaults are filled in. Unknown kinds, duplicate ids and
/// wires to missing nodes throw FlowError; everything else is reported by
/// validate_graph().
FlowGraph parse_flow(std::string_view text, const NodeRegistry& registry);

/// Empty iff the graph satisfies every structural and configuration rule.
std::vector<Diagnostic> validate_graph(const FlowGraph& graph, const NodeRegistry& registry);

/// `config` with missing defaulted keys filled in.
Payload with_defaults(const NodeSpec& spec, const Payload& config);

/// Serializes back to the document format (wires regrouped per node).
std::string to_json(const FlowGraph& graph);

}  // namespace selfheal
