// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "meshkit/manifest.hpp"
#include "meshkit/token.hpp"

namespace meshkit {

struct ObjectConstraints {
  bool downloadable_out_of_aae = false;
  bool redistributable = false;

  bool operator==(const ObjectConstraints&) const = default;
};

/// One object hosted by the node. The PID is kept as raw fixture text so
/// broken fixtures (conformance mutants) can carry unparseable ids.
struct HostedObject {
  std::string pid;
  DataObjectType object_type = DataObjectType::dataset;
  nlohmann::json metadata = nlohmann::json::object();
  AccessTier access_tier = AccessTier::open;
  std::string content;
  std::string checksum;  // sha-256 hex of content unless the fixture lies
  uint64_t size = 0;
  ObjectConstraints constraints;
  std::vector<std::string> subject_ids;
};

struct AccessGrant {
  std::string pid;
  bool granted = false;
  std::optional<ObjectConstraints> constraints;  // absent unless granted
  std::string reason;
};

struct AaeDescriptor {
  std::string aae_id;
  std::set<std::string> attested_requirements;
};

struct TransferGrant {
  std::string pid;
  std::string aae_id;
  ObjectConstraints constraints;
  std::string transfer_url;
};

/// DRS-like data descriptor (no wire-compliance claim).
struct DataDescriptor {
  std::string id;
  std::string checksum;
  uint64_t size = 0;
  std::string access_url;
};

struct TypedLink {
  std::string rel;
  std::string href;
};

struct UserRecord {
  std::string username;
  std::string secret;
  bool registered = false;
  // visa scopes with expiry relative to token issuance (negative = already
  // expired, for fixtures)
  std::vector<std::pair<std::string, int64_t>> visas;
};

/// Fault knobs for conformance mutants. A pristine fixture sets none.
struct NodeFaults {
  bool drop_metadata_endpoint = false;
  bool authz_always_grant = false;
  bool transfer_any_aae = false;
};

struct NodeConfig {
  std::string platform_id;
  std::string license = "public-domain-dedication";
  std::string issuer_secret;
  std::map<std::string, std::string> trusted_issuers;
  int64_t token_ttl_seconds = 3600;
  std::set<std::string> attested_requirements;
  std::set<AccessTier> access_tiers_served;
  std::set<std::string> authorized_aaes;
  bool requires_result_review = false;
  bool federated_enabled = true;
  bool usage_reports_opt_out = false;
  std::vector<UserRecord> users;
  std::vector<HostedObject> objects;
  NodeFaults faults;

  static NodeConfig from_json(const nlohmann::json& j);
  static NodeConfig load(const std::string& path);

  PlatformDescriptor descriptor(const std::string& endpoint) const;
};

struct ObjectPage {
  std::vector<std::string> pids;
  std::optional<std::string> next_cursor;
};

/// A reference data platform. The object store is immutable after fixture
/// load; the audit log appends atomically; request handlers are safe
/// under concurrent invocation.
class PlatformNode {
 public:
  explicit PlatformNode(NodeConfig config, std::string audit_log_path = "");

  const NodeConfig& config() const { return config_; }
  const std::string& base_url() const { return base_url_; }
  void set_base_url(std::string url) { base_url_ = std::move(url); }

  /// Issues a passport token for a known user. Throws BadCredentials.
  std::string authenticate(const std::string& username,
                           const std::string& secret) const;

  /// Metadata plus typed links (rel=data, rel=license). Public even for
  /// controlled-tier objects. Throws UnknownPid.
  std::pair<nlohmann::json, std::vector<TypedLink>> get_metadata(
      const std::string& pid) const;

  /// The tier decision matrix. open: always granted; registered: valid
  /// token with registered=true; controlled: valid token with an
  /// unexpired visa scoped to the PID or to guid:<platform>/ALL.
  AccessGrant authorize(const std::optional<std::string>& token_wire,
                        const std::string& pid) const;

  /// Throws NotAuthorized when authorize denies.
  DataDescriptor get_data(const std::optional<std::string>& token_wire,
                          const std::string& pid) const;

  /// Raw content bytes behind the descriptor's access URL, same
  /// authorization as get_data.
  std::string read_content(const std::optional<std::string>& token_wire,
                           const std::string& pid);

  /// Throws AaeNotAuthorized for AAEs not on this node's allow-list —
  /// that determination is the node's alone. Records an audit entry.
  TransferGrant transfer_to_aae(const std::string& pid,
                                const std::string& aae_id,
                                const std::optional<std::string>& token_wire);

  ObjectPage list_objects(const std::optional<std::string>& cursor,
                          size_t page_size = 100) const;

  /// Declarative aggregate over objects the caller is authorized for.
  /// Returns {status, value, requires_review}. Throws FederatedDisabled.
  nlohmann::json execute_computation(
      const nlohmann::json& computation,
      const std::optional<std::string>& token_wire) const;

  /// Usage-report delivery; idempotent on (platform_id, period).
  void receive_usage_report(const nlohmann::json& report);
  std::vector<nlohmann::json> received_usage_reports() const;

  std::vector<nlohmann::json> audit_entries() const;

  const TokenCodec& codec() const { return codec_; }

 private:
  const HostedObject& find_object(const std::string& pid) const;
  void append_audit(nlohmann::json entry);

  NodeConfig config_;
  TokenCodec codec_;
  std::string base_url_;
  std::string audit_log_path_;
  std::map<std::string, HostedObject> objects_;  // pid text -> object

  mutable std::mutex mutex_;
  std::vector<nlohmann::json> audit_;
  std::map<std::string, nlohmann::json> usage_reports_;  // period key -> report
};

}  // namespace meshkit
