// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <thread>

#include "httplib.h"
#include "meshkit/node.hpp"

namespace meshkit {

/// HTTP surface of a platform node. Binds, serves on a background thread,
/// and sets the node's base URL so links and transfer URLs point back at
/// the bound address.
class NodeServer {
 public:
  explicit NodeServer(PlatformNode& node);
  ~NodeServer();

  NodeServer(const NodeServer&) = delete;
  NodeServer& operator=(const NodeServer&) = delete;

  /// port 0 binds an OS-assigned port. Returns the bound port. Throws
  /// MeshError(port_in_use) when the address cannot be bound.
  int start(const std::string& host, int port);
  void stop();

  const std::string& url() const { return url_; }

 private:
  void wire_routes();

  PlatformNode& node_;
  httplib::Server server_;
  std::thread thread_;
  std::string url_;
};

}  // namespace meshkit
