// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <thread>

#include "httplib.h"
#include "meshkit/federated.hpp"
#include "meshkit/hub.hpp"
#include "meshkit/registry.hpp"

namespace meshkit {

/// HTTP face of the DMMS registry. The registration and query endpoints
/// are the mesh's public DMM API (Pillar 10); record reads honor the
/// manifest's visibility rules via the bearer token.
class RegistryServer {
 public:
  explicit RegistryServer(Registry& registry);
  ~RegistryServer();

  /// Tokens from these issuers mark the caller as an authenticated mesh
  /// member (visibility gate for private records).
  void trust_issuer(const std::string& issuer, const std::string& secret);

  int start(const std::string& host, int port);
  void stop();
  const std::string& url() const { return url_; }

 private:
  void wire_routes();
  std::optional<std::string> caller_of(const httplib::Request& req) const;

  Registry& registry_;
  std::map<std::string, std::string> issuer_secrets_;
  httplib::Server server_;
  std::thread thread_;
  std::string url_;
};

/// HTTP face of the hub and the federated executor. Every request and
/// response body passes through the hub's TransportLog so the
/// data-locality invariant can be audited after the fact.
class HubServer {
 public:
  HubServer(Hub& hub, FederatedExecutor& federated);
  ~HubServer();

  int start(const std::string& host, int port);
  void stop();
  const std::string& url() const { return url_; }

 private:
  void wire_routes();
  void attach_notice(const httplib::Request& req, nlohmann::json& body);

  Hub& hub_;
  FederatedExecutor& federated_;
  httplib::Server server_;
  std::thread thread_;
  std::string url_;
};

}  // namespace meshkit
