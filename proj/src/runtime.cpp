// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/runtime.hpp"

#include <filesystem>
#include <fstream>

#include "meshkit/errors.hpp"

namespace meshkit {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j,
                                         const std::string& base_dir) {
  ScenarioConfig c;
  c.manifest_path = resolve(base_dir, j.at("manifest").get<std::string>());
  for (const auto& n : j.value("nodes", nlohmann::json::array())) {
    c.node_fixture_paths.push_back(resolve(base_dir, n.get<std::string>()));
  }
  auto hub = j.value("hub", nlohmann::json::object());
  c.hub.live_authz = hub.value("live_authz", false);
  c.hub.linkage_key = hub.value("linkage_key", c.hub.linkage_key);
  c.hub.leak_open_identities = hub.value("leak_open_identities", false);
  if (j.contains("probe")) c.probe = ProbeConfig::from_json(j.at("probe"));
  if (j.contains("output_dir")) {
    c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
  }
  c.harvest_on_start = j.value("harvest_on_start", true);
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MeshError(ErrorCode::bad_fixture, "cannot open " + path);
  }
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw MeshError(ErrorCode::bad_fixture, path + " is not valid JSON");
  }
  auto base_dir = std::filesystem::path(path).parent_path().string();
  auto config = from_json(j, base_dir);
  // invariant: every referenced fixture exists before anything starts
  if (!std::filesystem::exists(config.manifest_path)) {
    throw MeshError(ErrorCode::bad_fixture,
                    "missing fixture " + config.manifest_path);
  }
  for (const auto& n : config.node_fixture_paths) {
    if (!std::filesystem::exists(n)) {
      throw MeshError(ErrorCode::bad_fixture, "missing fixture " + n);
    }
  }
  return config;
}

MeshRuntime::MeshRuntime(ScenarioConfig config) : config_(std::move(config)) {
  manifest_ = load_manifest(config_.manifest_path);
}

MeshRuntime::~MeshRuntime() { stop(); }

void MeshRuntime::start(int port_base) {
  std::string journal_path;
  if (!config_.output_dir.empty()) {
    std::filesystem::create_directories(config_.output_dir);
    journal_path =
        (std::filesystem::path(config_.output_dir) / "journal.jsonl").string();
  }
  registry_ = std::make_unique<Registry>(manifest_, journal_path);
  hub_ = std::make_unique<Hub>(*registry_, config_.hub, &tap_);
  federated_ = std::make_unique<FederatedExecutor>(*hub_);
  registry_server_ = std::make_unique<RegistryServer>(*registry_);
  hub_server_ = std::make_unique<HubServer>(*hub_, *federated_);

  int next_node_port = port_base == 0 ? 0 : port_base + 2;
  for (const auto& fixture : config_.node_fixture_paths) {
    auto node_config = NodeConfig::load(fixture);
    std::string audit_path;
    if (!config_.output_dir.empty()) {
      audit_path = (std::filesystem::path(config_.output_dir) /
                    (node_config.platform_id + "-audit.jsonl"))
                       .string();
    }
    auto& node = *nodes_.emplace_back(
        std::make_unique<PlatformNode>(node_config, audit_path));
    auto& server =
        *node_servers_.emplace_back(std::make_unique<NodeServer>(node));
    server.start("127.0.0.1", port_base == 0 ? 0 : next_node_port++);

    hub_->attach_node(node_config.descriptor(server.url()),
                      node_config.usage_reports_opt_out);
    hub_->trust_issuer(node_config.platform_id, node_config.issuer_secret);
    registry_server_->trust_issuer(node_config.platform_id,
                                   node_config.issuer_secret);
  }

  registry_server_->start("127.0.0.1", port_base == 0 ? 0 : port_base);
  hub_server_->start("127.0.0.1", port_base == 0 ? 0 : port_base + 1);

  if (config_.harvest_on_start) hub_->harvest();

  if (!config_.output_dir.empty()) {
    std::ofstream out(
        (std::filesystem::path(config_.output_dir) / "mesh.json").string());
    out << descriptor().to_json().dump(2) << '\n';
  }
}

void MeshRuntime::stop() {
  if (hub_server_) hub_server_->stop();
  if (registry_server_) registry_server_->stop();
  for (auto& server : node_servers_) server->stop();
}

MeshDescriptor MeshRuntime::descriptor() const {
  MeshDescriptor d;
  d.manifest = manifest_;
  d.dmms_endpoint = registry_server_->url();
  d.hub_endpoint = hub_server_->url();
  for (size_t i = 0; i < nodes_.size(); ++i) {
    d.nodes.emplace_back(nodes_[i]->config().platform_id,
                         node_servers_[i]->url());
  }
  d.probe = config_.probe;
  return d;
}

nlohmann::json MeshRuntime::endpoint_table() const {
  nlohmann::json nodes = nlohmann::json::object();
  for (size_t i = 0; i < nodes_.size(); ++i) {
    nodes[nodes_[i]->config().platform_id] = node_servers_[i]->url();
  }
  return {{"dmms", registry_server_->url()},
          {"hub", hub_server_->url()},
          {"nodes", nodes}};
}

}  // namespace meshkit
