// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "meshkit/conformance.hpp"
#include "meshkit/federated.hpp"
#include "meshkit/hub.hpp"
#include "meshkit/mesh_server.hpp"
#include "meshkit/node_server.hpp"

namespace meshkit {

/// Everything `mesh up` needs: the governance manifest, the node
/// fixtures, hub options, probe anchors, and where to put artifacts
/// (journal, audit logs, descriptor). Relative paths resolve against the
/// scenario file's directory.
struct ScenarioConfig {
  std::string manifest_path;
  std::vector<std::string> node_fixture_paths;
  HubOptions hub;
  ProbeConfig probe;
  std::string output_dir;
  bool harvest_on_start = true;

  static ScenarioConfig from_json(const nlohmann::json& j,
                                  const std::string& base_dir);
  /// Throws MeshError(bad_fixture) naming the path.
  static ScenarioConfig load(const std::string& path);
};

/// One in-process mesh: N node servers, the DMMS, and the hub, wired
/// together and serving HTTP. Start order is nodes → registry/hub
/// services so platform endpoints are known at enrollment time.
class MeshRuntime {
 public:
  explicit MeshRuntime(ScenarioConfig config);
  ~MeshRuntime();

  MeshRuntime(const MeshRuntime&) = delete;
  MeshRuntime& operator=(const MeshRuntime&) = delete;

  /// port_base 0 = OS-assigned everywhere; otherwise DMMS gets
  /// port_base, the hub port_base+1, node i port_base+2+i.
  void start(int port_base = 0);
  void stop();

  Registry& registry() { return *registry_; }
  Hub& hub() { return *hub_; }
  FederatedExecutor& federated() { return *federated_; }
  TransportLog& transport() { return tap_; }
  PlatformNode& node(size_t i) { return *nodes_.at(i); }
  size_t node_count() const { return nodes_.size(); }
  const std::string& node_url(size_t i) const {
    return node_servers_.at(i)->url();
  }
  const std::string& dmms_url() const { return registry_server_->url(); }
  const std::string& hub_url() const { return hub_server_->url(); }
  const MeshManifest& manifest() const { return manifest_; }
  const ScenarioConfig& scenario() const { return config_; }

  MeshDescriptor descriptor() const;
  nlohmann::json endpoint_table() const;

 private:
  ScenarioConfig config_;
  MeshManifest manifest_;
  TransportLog tap_;
  std::unique_ptr<Registry> registry_;
  std::unique_ptr<Hub> hub_;
  std::unique_ptr<FederatedExecutor> federated_;
  std::vector<std::unique_ptr<PlatformNode>> nodes_;
  std::vector<std::unique_ptr<NodeServer>> node_servers_;
  std::unique_ptr<RegistryServer> registry_server_;
  std::unique_ptr<HubServer> hub_server_;
};

}  // namespace meshkit
