#include "selfheal/core/node.hpp"

#include <stdexcept>

namespace selfheal {

int NodeSpec::egress_count(const Payload& config) const {
  if (dynamic_egress) {
    return dynamic_egress(config);
  }
  return static_cast<int>(egress_names.size());
}

std::string NodeSpec::egress_name(const Payload& config, int port) const {
  if (!dynamic_egress && port >= 0 && port < static_cast<int>(egress_names.size())) {
    return egress_names[static_cast<std::size_t>(port)];
  }
  (void)config;
  return std::to_string(port);
}

void NodeRegistry::add(NodeSpec spec) {
  std::string kind = spec.kind;
  if (!specs_.emplace(kind, std::move(spec)).second) {
    throw std::logic_error("NodeRegistry: duplicate kind '" + kind + "'");
  }
}

const NodeSpec* NodeRegistry::find(std::string_view kind) const {
  auto it = specs_.find(kind);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> NodeRegistry::kinds() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : specs_) {
    out.push_back(k);
  }
  return out;
}

}  // namespace selfheal
