#include "selfheal/nodes/discovery.hpp"

#include "selfheal/nodes/common.hpp"
#include "selfheal/persistence/store.hpp"

namespace selfheal::nodes {

InventoryDiff diff_inventory(const Inventory& before, const Inventory& now) {
  InventoryDiff d;
  for (const auto& [id, ep] : now) {
    if (!before.contains(id)) {
      d.appeared.push_back(id);
    }
  }
  for (const auto& [id, ep] : before) {
    if (!now.contains(id)) {
      d.vanished.push_back(id);
    }
  }
  return d;
}

void ProbeNode::start(NodeContext& ctx) { timer_ = ctx.start_timer(period_); }

void ProbeNode::on_input(NodeContext& ctx, int, const Envelope&) { scan(ctx); }

void ProbeNode::on_timer(NodeContext& ctx, TimerId id, int) {
  if (!timer_ || *timer_ != id) {
    return;
  }
  timer_ = ctx.start_timer(period_);
  scan(ctx);
}

void ProbeNode::scan(NodeContext& ctx) {
  Inventory now = probe(ctx);
  InventoryDiff d = diff_inventory(last_, now);
  auto event = [&](std::string_view what, const std::string& id, const std::string& endpoint) {
    ctx.emit(0, Message{std::string(kind()),
                        Payload{{"event", std::string(what)},
                                {"id", id},
                                {"kind", std::string(kind())},
                                {"endpoint", endpoint}},
                        std::nullopt});
  };
  for (const auto& id : d.appeared) {
    event(appeared_event(), id, now.at(id));
  }
  for (const auto& id : d.vanished) {
    event(vanished_event(), id, last_.at(id));
  }
  last_ = std::move(now);
}

Inventory HttpAwareNode::probe(NodeContext& ctx) {
  Inventory out;
  for (const auto& s : ctx.environment().probe_services()) {
    if (ports_.contains(s.port)) {
      out[s.name] = s.host + ":" + std::to_string(s.port);
    }
  }
  return out;
}

Inventory NetworkAwareNode::probe(NodeContext& ctx) {
  Inventory out;
  for (const auto& h : ctx.environment().scan_hosts()) {
    out[h.id] = h.address;
  }
  return out;
}

void DeviceRegistryNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  const auto& p = e.payload;
  if (!p.is_object() || !p.contains("event") || !p.contains("id") || !p["event"].is_string() ||
      !p["id"].is_string()) {
    forward(ctx, 1, e, error_payload("malformed", "expected {\"event\", \"id\"}"));
    return;
  }
  const std::string event = p["event"].get<std::string>();
  const std::string id = p["id"].get<std::string>();
  auto text = [&](const char* key, const char* fallback) {
    return p.contains(key) && p[key].is_string() && !p[key].get<std::string>().empty() ? p[key].get<std::string>()
                                                                                        : std::string(fallback);
  };
  persistence::RegistryEntry entry;
  try {
    if (event == "joined" || event == "appeared") {
      entry = ctx.store().registry_upsert(persistence::RegistryEntry{
          id, text("kind", "device"), text("endpoint", "-"), ctx.now(), persistence::DeviceStatus::Online});
    } else if (event == "left" || event == "disappeared" || event == "heartbeat-error") {
      entry = ctx.store().registry_mark_lost(id, ctx.now());
    } else {
      forward(ctx, 1, e, error_payload("malformed", "unknown event '" + event + "'"));
      return;
    }
  } catch (const persistence::StoreError& ex) {
    forward(ctx, 1, e, error_payload("registry", ex.what()));
    return;
  }
  ctx.emit(0, Message{"registry",
                      Payload{{"id", entry.device_id},
                              {"kind", entry.kind},
                              {"endpoint", entry.endpoint},
                              {"status", std::string(persistence::to_string(entry.status))},
                              {"lastSeen", entry.last_seen}},
                      e.corr});
}

}  // namespace selfheal::nodes
