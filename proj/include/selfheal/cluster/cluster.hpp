#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selfheal/core/envelope.hpp"

namespace selfheal::cluster {

class ClusterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  enum class Kind { Malformed, UnknownVerb };
  ProtocolError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr TimeMs kDefaultElectionTimeout = 15'000;

struct InstanceId {
  std::string address;
  int last_octet = 0;
  std::string name;

  /// Parses a dotted-quad address. `name` defaults to the address.
  static InstanceId parse(std::string_view address, std::string name = {});

  std::array<int, 4> octets() const;

  bool operator==(const InstanceId& other) const { return address == other.address; }
};

enum class Role { Standby, Master };

std::string_view to_string(Role role);

struct Ping {
  std::string address;
  std::uint64_t epoch = 0;
  TimeMs time = 0;

  bool operator==(const Ping&) const = default;
};

/// "SHEN/1 PING <address> <epoch> <virtual-ms>\n"
std::string encode_ping(const InstanceId& self, std::uint64_t epoch, TimeMs now);

/// Throws ProtocolError: UnknownVerb for well-framed lines with another verb,
/// Malformed for everything else that is not a valid ping.
Ping decode_ping(std::string_view datagram);

/// Highest last octet wins; equal octets fall back to comparing the full
/// addresses octet by octet. Throws ClusterError on an empty set.
InstanceId elect_master(std::span<const InstanceId> alive);

struct PeerInfo {
  InstanceId id;
  TimeMs last_seen = 0;
  bool alive = true;
};

class PeerTable {
 public:
  explicit PeerTable(TimeMs election_timeout = kDefaultElectionTimeout) : timeout_(election_timeout) {}

  /// Refreshes (or registers) `peer`. Returns true when the peer was unknown
  /// or previously declared dead.
  bool on_ping(const InstanceId& peer, TimeMs now);

  /// Peers whose silence exceeds the timeout (now - lastSeen > timeout),
  /// each reported once when it flips to dead.
  std::vector<InstanceId> detect_failures(TimeMs now);

  std::vector<InstanceId> alive() const;
  const std::map<std::string, PeerInfo>& peers() const { return peers_; }
  TimeMs timeout() const { return timeout_; }

 private:
  TimeMs timeout_;
  std::map<std::string, PeerInfo> peers_;
};

struct FlowCommand {
  bool enable = false;
  std::string flow;

  bool operator==(const FlowCommand&) const = default;
};

struct Transition {
  Role from = Role::Standby;
  Role to = Role::Standby;
  std::uint64_t epoch = 0;
  InstanceId master;
  std::vector<FlowCommand> commands;
};

/// One instance's view of the cluster. Elections are local computations over
/// the alive set, so every instance that sees the same peers agrees on the
/// master without exchanging ballots.
class ClusterState {
 public:
  ClusterState(InstanceId self, TimeMs election_timeout, std::vector<std::string> controlled_flows);

  const InstanceId& self() const { return self_; }
  Role role() const { return role_; }
  std::uint64_t epoch() const { return epoch_; }
  TimeMs election_timeout() const { return peers_.timeout(); }
  const PeerTable& peers() const { return peers_; }

  /// Self-pings are ignored and return false.
  bool on_ping(const InstanceId& peer, TimeMs now);
  std::vector<InstanceId> detect_failures(TimeMs now) { return peers_.detect_failures(now); }

  /// Runs an election over alive peers plus self. Returns the transition
  /// when the role changed; the epoch increments on every change.
  std::optional<Transition> role_transition();

  /// Current winner over alive peers plus self.
  InstanceId current_master() const;

 private:
  InstanceId self_;
  PeerTable peers_;
  std::vector<std::string> controlled_;
  Role role_ = Role::Standby;
  std::uint64_t epoch_ = 0;
};

}  // namespace selfheal::cluster
