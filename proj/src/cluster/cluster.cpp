#include "selfheal/cluster/cluster.hpp"

#include <algorithm>
#include <charconv>

namespace selfheal::cluster {

namespace {

constexpr std::string_view kMagic = "SHEN/1";

std::optional<int> parse_octet(std::string_view s) {
  if (s.empty() || s.size() > 3) {
    return std::nullopt;
  }
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v < 0 || v > 255) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::array<int, 4>> parse_quad(std::string_view address) {
  std::array<int, 4> out{};
  std::size_t start = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t dot = address.find('.', start);
    if ((i < 3) != (dot != std::string_view::npos)) {
      return std::nullopt;
    }
    auto octet = parse_octet(address.substr(start, i < 3 ? dot - start : std::string_view::npos));
    if (!octet) {
      return std::nullopt;
    }
    out[static_cast<std::size_t>(i)] = *octet;
    start = dot + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_unsigned(std::string_view s) {
  if (s.empty()) {
    return std::nullopt;
  }
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t sp = line.find(' ', start);
    if (sp == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

bool ranks_higher(const InstanceId& a, const InstanceId& b) {
  if (a.last_octet != b.last_octet) {
    return a.last_octet > b.last_octet;
  }
  return a.octets() > b.octets();
}

}  // namespace

InstanceId InstanceId::parse(std::string_view address, std::string name) {
  auto quad = parse_quad(address);
  if (!quad) {
    throw ClusterError("invalid instance address '" + std::string(address) + "'");
  }
  InstanceId id;
  id.address = std::string(address);
  id.last_octet = (*quad)[3];
  id.name = name.empty() ? id.address : std::move(name);
  return id;
}

std::array<int, 4> InstanceId::octets() const {
  auto quad = parse_quad(address);
  return quad ? *quad : std::array<int, 4>{};
}

std::string_view to_string(Role role) { return role == Role::Master ? "master" : "standby"; }

std::string encode_ping(const InstanceId& self, std::uint64_t epoch, TimeMs now) {
  return std::string(kMagic) + " PING " + self.address + " " + std::to_string(epoch) + " " + std::to_string(now) +
         "\n";
}

Ping decode_ping(std::string_view datagram) {
  auto malformed = [&](const std::string& why) {
    return ProtocolError(ProtocolError::Kind::Malformed, "malformed datagram (" + why + ")");
  };
  if (datagram.empty() || datagram.back() != '\n') {
    throw malformed("missing line terminator");
  }
  datagram.remove_suffix(1);
  auto parts = split_spaces(datagram);
  if (parts.empty() || parts[0] != kMagic) {
    throw malformed("bad protocol tag");
  }
  if (parts.size() < 2 || parts[1].empty()) {
    throw malformed("missing verb");
  }
  if (parts[1] != "PING") {
    throw ProtocolError(ProtocolError::Kind::UnknownVerb, "unknown verb '" + std::string(parts[1]) + "'");
  }
  if (parts.size() != 5) {
    throw malformed("expected 5 fields");
  }
  if (!parse_quad(parts[2])) {
    throw malformed("bad address");
  }
  auto epoch = parse_unsigned<std::uint64_t>(parts[3]);
  auto time = parse_unsigned<TimeMs>(parts[4]);
  if (!epoch || !time || *time < 0) {
    throw malformed("bad number");
  }
  return Ping{std::string(parts[2]), *epoch, *time};
}

InstanceId elect_master(std::span<const InstanceId> alive) {
  if (alive.empty()) {
    throw ClusterError("elect_master: alive set is empty");
  }
  const InstanceId* best = &alive.front();
  for (const auto& id : alive.subspan(1)) {
    if (ranks_higher(id, *best)) {
      best = &id;
    }
  }
  return *best;
}

bool PeerTable::on_ping(const InstanceId& peer, TimeMs now) {
  auto [it, inserted] = peers_.try_emplace(peer.address, PeerInfo{peer, now, true});
  if (inserted) {
    return true;
  }
  bool revived = !it->second.alive;
  it->second.last_seen = std::max(it->second.last_seen, now);
  it->second.alive = true;
  return revived;
}

std::vector<InstanceId> PeerTable::detect_failures(TimeMs now) {
  std::vector<InstanceId> dead;
  for (auto& [addr, info] : peers_) {
    if (info.alive && now - info.last_seen > timeout_) {
      info.alive = false;
      dead.push_back(info.id);
    }
  }
  return dead;
}

std::vector<InstanceId> PeerTable::alive() const {
  std::vector<InstanceId> out;
  for (const auto& [addr, info] : peers_) {
    if (info.alive) {
      out.push_back(info.id);
    }
  }
  return out;
}

ClusterState::ClusterState(InstanceId self, TimeMs election_timeout, std::vector<std::string> controlled_flows)
    : self_(std::move(self)), peers_(election_timeout), controlled_(std::move(controlled_flows)) {
  if (election_timeout <= 0) {
    throw ClusterError("election timeout must be positive");
  }
}

bool ClusterState::on_ping(const InstanceId& peer, TimeMs now) {
  if (peer == self_) {
    return false;
  }
  return peers_.on_ping(peer, now);
}

InstanceId ClusterState::current_master() const {
  auto alive = peers_.alive();
  alive.push_back(self_);
  return elect_master(alive);
}

std::optional<Transition> ClusterState::role_transition() {
  InstanceId master = current_master();
  Role next = master == self_ ? Role::Master : Role::Standby;
  if (next == role_) {
    return std::nullopt;
  }
  Transition t{role_, next, ++epoch_, master, {}};
  for (const auto& flow : controlled_) {
    t.commands.push_back(FlowCommand{next == Role::Master, flow});
  }
  role_ = next;
  return t;
}

}  // namespace selfheal::cluster
