#pragma once

#include "selfheal/core/node.hpp"

namespace selfheal::nodes {

/// Every operator kind shipped with the runtime, with its configuration
/// schema and invariants.
const NodeRegistry& builtin_registry();

}  // namespace selfheal::nodes
