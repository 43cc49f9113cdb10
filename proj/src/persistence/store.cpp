#include "selfheal/persistence/store.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace selfheal::persistence {

namespace {

bool is_token(std::string_view s) {
  return !s.empty() && s.find_first_of(" \t\r\n") == std::string_view::npos;
}

void require_token(std::string_view s, const char* what) {
  if (!is_token(s)) {
    throw StoreError(std::string("store: ") + what + " must be a non-empty token without whitespace, got '" +
                     std::string(s) + "'");
  }
}

std::optional<TimeMs> parse_time(std::string_view s) {
  TimeMs v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::string checkpoint_line(const std::string& node_id, TimeMs ts, const std::optional<Message>& msg) {
  Payload body = nullptr;
  if (msg) {
    body = Payload{{"topic", msg->topic}, {"payload", msg->payload}};
    if (msg->corr) {
      body["corr"] = *msg->corr;
    }
  }
  return "CKPT " + node_id + " " + std::to_string(ts) + " " + compact(body);
}

std::string registry_line(const RegistryEntry& e) {
  return "REG " + e.device_id + " " + e.kind + " " + e.endpoint + " " + std::to_string(e.last_seen) + " " +
         std::string(to_string(e.status));
}

}  // namespace

std::string_view to_string(DeviceStatus status) { return status == DeviceStatus::Online ? "online" : "lost"; }

Store Store::open(const std::filesystem::path& path) {
  Store store;
  std::ifstream in(path);
  if (in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) {
        store.apply_line(line);
      }
    }
  }
  store.path_ = path;
  std::ofstream touch(path, std::ios::app);
  if (!touch) {
    throw StoreError("store: cannot open " + path.string());
  }
  return store;
}

Store Store::from_text(std::string_view text) {
  Store store;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      store.apply_line(line);
    }
  }
  return store;
}

void Store::apply_line(const std::string& line) {
  auto corrupt = [&](const std::string& why) { diagnostics_.push_back("corrupt record (" + why + "): " + line); };
  std::istringstream in(line);
  std::string tag;
  in >> tag;
  if (tag == "CKPT") {
    std::string node, ts_text;
    in >> node >> ts_text;
    std::string rest;
    std::getline(in, rest);
    if (!rest.empty() && rest.front() == ' ') {
      rest.erase(0, 1);
    }
    auto ts = parse_time(ts_text);
    if (node.empty() || !ts) {
      corrupt("bad header");
      return;
    }
    Payload body = Payload::parse(rest, nullptr, false);
    if (body.is_discarded()) {
      // The slot's latest write is unreadable; treat it as empty.
      checkpoints_[node] = std::nullopt;
      corrupt("bad JSON");
      lines_.push_back(line);
      return;
    }
    if (body.is_null()) {
      checkpoints_[node] = std::nullopt;
    } else if (body.is_object() && body.contains("payload") && body.contains("topic") && body["topic"].is_string()) {
      Message msg{body["topic"].get<std::string>(), body["payload"], std::nullopt};
      if (body.contains("corr") && body["corr"].is_string()) {
        msg.corr = body["corr"].get<std::string>();
      }
      checkpoints_[node] = CheckpointRecord{*ts, std::move(msg)};
    } else {
      checkpoints_[node] = std::nullopt;
      corrupt("bad message shape");
    }
    lines_.push_back(line);
  } else if (tag == "REG") {
    RegistryEntry e;
    std::string last_seen, status;
    in >> e.device_id >> e.kind >> e.endpoint >> last_seen >> status;
    auto ts = parse_time(last_seen);
    if (e.device_id.empty() || e.endpoint.empty() || !ts || (status != "online" && status != "lost")) {
      corrupt("bad registry fields");
      return;
    }
    e.last_seen = *ts;
    e.status = status == "online" ? DeviceStatus::Online : DeviceStatus::Lost;
    registry_[e.device_id] = e;
    lines_.push_back(line);
  } else {
    corrupt("unknown tag");
  }
}

void Store::write_line(std::string line) {
  if (fail_writes_) {
    throw StoreError("store: write failed (injected)");
  }
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    out << line << '\n';
    out.flush();
    if (!out) {
      throw StoreError("store: write to " + path_->string() + " failed");
    }
  }
  lines_.push_back(std::move(line));
}

std::size_t Store::live_count() const { return checkpoints_.size() + registry_.size(); }

void Store::compact_if_needed() {
  if (lines_.size() <= 2 * live_count() + 16) {
    return;
  }
  std::vector<std::string> live;
  for (const auto& [node, rec] : checkpoints_) {
    if (rec) {
      live.push_back(checkpoint_line(node, rec->timestamp, rec->last_message));
    }
  }
  for (const auto& [id, e] : registry_) {
    live.push_back(registry_line(e));
  }
  if (path_) {
    auto tmp = *path_;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      for (const auto& l : live) {
        out << l << '\n';
      }
      if (!out) {
        throw StoreError("store: compaction of " + path_->string() + " failed");
      }
    }
    std::filesystem::rename(tmp, *path_);
  }
  // Cleared slots need no line once compacted.
  std::erase_if(checkpoints_, [](const auto& kv) { return !kv.second.has_value(); });
  lines_ = std::move(live);
}

std::string Store::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void Store::store_checkpoint(const std::string& node_id, const Message& message, TimeMs timestamp) {
  require_token(node_id, "node id");
  write_line(checkpoint_line(node_id, timestamp, message));
  checkpoints_[node_id] = CheckpointRecord{timestamp, message};
  compact_if_needed();
}

std::optional<CheckpointRecord> Store::load_checkpoint(const std::string& node_id) const {
  auto it = checkpoints_.find(node_id);
  if (it == checkpoints_.end()) {
    return std::nullopt;
  }
  return it->second;
}

void Store::clear_checkpoint(const std::string& node_id) {
  auto it = checkpoints_.find(node_id);
  if (it == checkpoints_.end() || !it->second) {
    return;
  }
  write_line(checkpoint_line(node_id, it->second->timestamp, std::nullopt));
  it->second.reset();
  compact_if_needed();
}

RegistryEntry Store::registry_upsert(RegistryEntry entry) {
  require_token(entry.device_id, "device id");
  require_token(entry.kind, "device kind");
  require_token(entry.endpoint, "endpoint");
  if (auto it = registry_.find(entry.device_id); it != registry_.end()) {
    entry.last_seen = std::max(entry.last_seen, it->second.last_seen);
  }
  write_line(registry_line(entry));
  registry_[entry.device_id] = entry;
  compact_if_needed();
  return entry;
}

RegistryEntry Store::registry_mark_lost(const std::string& device_id, TimeMs) {
  auto it = registry_.find(device_id);
  if (it == registry_.end()) {
    throw StoreError("store: unknown device '" + device_id + "'");
  }
  RegistryEntry entry = it->second;
  entry.status = DeviceStatus::Lost;
  write_line(registry_line(entry));
  it->second = entry;
  compact_if_needed();
  return entry;
}

std::optional<RegistryEntry> Store::registry_find(const std::string& device_id) const {
  auto it = registry_.find(device_id);
  if (it == registry_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<RegistryEntry> Store::registry_list() const {
  std::vector<RegistryEntry> out;
  out.reserve(registry_.size());
  for (const auto& [id, e] : registry_) {
    out.push_back(e);
  }
  return out;
}

}  // namespace selfheal::persistence
