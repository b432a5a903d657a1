// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "meshkit/manifest.hpp"

namespace meshkit {

/// Fixture anchors for the node probes, so a check never depends on
/// discovery beyond listing: one object per tier, one user with a visa
/// covering the controlled object, one registered user without it, and
/// the AAE allow-list edges.
struct ProbeConfig {
  std::string open_pid;
  std::string registered_pid;
  std::string controlled_pid;
  std::string registered_username;  // registered, visa covers controlled_pid
  std::string registered_secret;
  std::string plain_username;  // registered, no visa
  std::string plain_secret;
  std::string listed_aae;
  std::string unlisted_aae = "aae-probe-unlisted";

  static ProbeConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class CheckStatus { pass, fail, not_applicable };

std::string_view check_status_name(CheckStatus s);
std::optional<CheckStatus> check_status_from(std::string_view name);

struct Evidence {
  std::string probe;
  std::string observed;
  std::string expected;
};

struct PillarCheck {
  int pillar = 0;
  CheckStatus status = CheckStatus::pass;
  std::vector<Evidence> evidence;
};

struct ConformanceReport {
  std::string target;
  std::vector<PillarCheck> checks;  // pillars 1-5 for nodes, 6-10 for meshes
  bool overall = false;             // all applicable checks pass
  bool unreachable = false;
};

/// What check_mesh needs to find everything: the governance manifest,
/// service endpoints, the node roster, and the probe anchors.
struct MeshDescriptor {
  MeshManifest manifest;
  std::string dmms_endpoint;
  std::string hub_endpoint;
  std::vector<std::pair<std::string, std::string>> nodes;  // id -> endpoint
  ProbeConfig probe;

  static MeshDescriptor from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static MeshDescriptor load(const std::string& path);
};

/// Pillars 1-5 against one node endpoint. An unreachable node yields a
/// report with every check failed and unreachable=true.
ConformanceReport check_node(const std::string& endpoint,
                             const ProbeConfig& probe);

/// Pillars 6-10 against a mesh deployment.
ConformanceReport check_mesh(const MeshDescriptor& descriptor);

nlohmann::json report_to_json(const ConformanceReport& report);
ConformanceReport report_from_json(const nlohmann::json& j);

/// text: a ten-row pillar table plus a pass tally; json: lossless.
std::string render_report(const ConformanceReport& report,
                          const std::string& format);

/// 0 all applicable pass, 1 any fail, 2 unreachable.
int exit_code_for(const ConformanceReport& report);

}  // namespace meshkit
