#pragma once

#include <string>
#include <vector>

#include "selfheal/core/envelope.hpp"

namespace selfheal {

struct ServiceEndpoint {
  std::string name;
  std::string host;
  int port = 0;
};

struct HostRecord {
  std::string id;
  std::string address;
  std::string kind;
};

enum class RequestStatus { Delivered, ServiceDown, UnknownService };

/// The world an engine lives in: broker, external services, network
/// inventory and the cluster transport. The defaults describe an empty,
/// always-reachable world so an engine can run on its own.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual void publish(const std::string& /*instance*/, const Envelope& /*e*/) {}
  virtual RequestStatus request(const std::string& /*instance*/, const std::string& /*service*/,
                                const Envelope& /*e*/) {
    return RequestStatus::Delivered;
  }
  virtual std::vector<ServiceEndpoint> probe_services() const { return {}; }
  virtual std::vector<HostRecord> scan_hosts() const { return {}; }
  virtual void broadcast(const std::string& /*instance*/, const std::string& /*datagram*/) {}
};

}  // namespace selfheal
