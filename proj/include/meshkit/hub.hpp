// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "meshkit/node.hpp"
#include "meshkit/registry.hpp"
#include "meshkit/token.hpp"

namespace meshkit {

/// Tap on the hub's HTTP boundary. Every payload entering or leaving the
/// hub is appended here; the data-locality invariant is "no hosted
/// content sentinel ever appears in this log".
class TransportLog {
 public:
  struct Entry {
    std::string direction;  // "in" | "out"
    std::string where;      // method + url or route
    std::string payload;
  };

  void record(std::string direction, std::string where, std::string payload);
  std::vector<Entry> snapshot() const;
  size_t occurrences(std::string_view needle) const;
  size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
};

/// The hub's HTTP client for one node, tapped through a TransportLog.
/// Node-side error bodies are rethrown as the MeshError they encode, so
/// callers see the same error a direct caller would. A fresh connection
/// per call keeps the gateway safe under concurrent handler threads.
class NodeGateway {
 public:
  NodeGateway(std::string platform_id, std::string base_url,
              TransportLog* tap);

  const std::string& platform_id() const { return platform_id_; }
  const std::string& base_url() const { return base_url_; }

  /// Throws NodeUnreachable on transport failure, or the decoded
  /// MeshError on a 4xx/5xx body.
  nlohmann::json get_json(const std::string& path,
                          const std::optional<std::string>& token = {},
                          const std::map<std::string, std::string>& extra = {});
  nlohmann::json post_json(const std::string& path,
                           const nlohmann::json& body,
                           const std::optional<std::string>& token = {},
                           const std::map<std::string, std::string>& extra = {});

 private:
  std::string platform_id_;
  std::string base_url_;
  TransportLog* tap_ = nullptr;
};

/// Percent-encodes one path segment, leaving '/' and ':' readable so PID
/// paths stay legible in logs.
std::string encode_pid_path(std::string_view pid);

enum class Availability {
  available,
  requires_registration,
  requires_visa,
  unavailable,
};

std::string_view availability_name(Availability a);

struct SearchResult {
  DmmRecord record;
  Availability availability = Availability::unavailable;
};

struct SearchPage {
  std::vector<SearchResult> results;
  std::optional<std::string> next_cursor;
};

struct HarvestNodeSummary {
  std::string platform_id;
  size_t listed = 0;
  size_t upserts = 0;       // successful register_object calls
  size_t new_records = 0;   // minted mesh PIDs
  size_t changed = 0;       // records whose stored state changed
  std::vector<std::string> schema_failures;
  std::optional<std::string> error;  // node-level failure, e.g. unreachable
};

struct UsageEvent {
  std::string mesh_pid;
  std::string hosting_platform_id;
  AccessTier access_tier = AccessTier::open;
  std::optional<std::string> subject;  // only when tier >= registered
  int64_t timestamp = 0;
};

struct UsageReportEntry {
  std::string mesh_pid;
  uint64_t count = 0;
  std::vector<std::string> identities;  // deduplicated, sorted
};

struct UsageReport {
  std::string platform_id;
  int64_t period_start = 0;
  int64_t period_end = 0;
  std::vector<UsageReportEntry> entries;
};

nlohmann::json usage_report_to_json(const UsageReport& r);

/// A PPRL match. Only pair indices and the keyed-hash token leave the
/// linkage boundary; raw subject identifiers never do.
struct LinkedPair {
  size_t index_a = 0;
  size_t index_b = 0;
  std::string token;
};

struct HubOptions {
  bool live_authz = false;  // per-result node calls instead of cached tiers
  std::string linkage_key = "meshkit-demo-linkage-key";
  // Fault knob for conformance mutants: report identities even for
  // open-tier entries.
  bool leak_open_identities = false;
};

/// The data hub. Registry access is delegated to the (thread-safe)
/// Registry; the hub's own mutable state — usage events, session notices,
/// the retry queue — sits behind one mutex.
class Hub {
 public:
  Hub(Registry& registry, HubOptions options = {},
      TransportLog* tap = nullptr);

  /// Enrolls the platform with the registry and opens a gateway to it.
  void attach_node(const PlatformDescriptor& descriptor,
                   bool usage_opt_out = false);

  /// The hub verifies caller tokens locally when annotating availability;
  /// it trusts the same issuers the nodes do.
  void trust_issuer(const std::string& issuer, const std::string& secret);

  std::vector<HarvestNodeSummary> harvest();

  SearchPage search(const QueryFilter& filter,
                    const std::optional<std::string>& cursor,
                    size_t page_size,
                    const std::optional<std::string>& token);

  /// Resolves the mesh PID, relays transfer_to_aae to the hosting node,
  /// and appends exactly one UsageEvent on success. Node errors pass
  /// through unchanged; no content bytes are relayed.
  TransferGrant broker_access(const std::optional<std::string>& token,
                              const Pid& mesh_pid, const std::string& aae_id);

  /// Aggregates events in [start, end] into one report per platform and
  /// delivers each to the node's usage endpoint. Opted-out platforms are
  /// skipped when the manifest does not require usage stats; undeliverable
  /// reports are queued for retry.
  std::vector<UsageReport> report_usage(int64_t period_start,
                                        int64_t period_end);

  /// Re-attempts queued deliveries; returns how many went through.
  size_t retry_pending();
  size_t pending_report_count() const;

  /// The Pillar 9 collection notice, emitted once per session. An absent
  /// session id is treated as a fresh single-request session.
  std::optional<std::string> notice_for_session(
      const std::optional<std::string>& session_id);
  size_t notices_emitted() const;

  /// PPRL over GUIDs: trim+lowercase, keyed-hash, match on token
  /// equality. Throws LinkageDisabled unless manifest.linkage_mode==guid.
  std::vector<LinkedPair> link_subjects(const std::vector<std::string>& a,
                                        const std::vector<std::string>& b)
      const;

  std::vector<UsageEvent> usage_events() const;
  Registry& registry() { return registry_; }
  const HubOptions& options() const { return options_; }
  TransportLog* tap() const { return tap_; }
  std::vector<std::string> attached_platforms() const;
  NodeGateway& gateway(const std::string& platform_id);

 private:
  Availability annotate(const DmmRecord& record,
                        const std::optional<Token>& token,
                        const std::optional<std::string>& token_wire);
  bool deliver(const UsageReport& report);

  Registry& registry_;
  HubOptions options_;
  TransportLog* tap_ = nullptr;

  std::map<std::string, NodeGateway> gateways_;
  std::set<std::string> opted_out_;
  std::map<std::string, std::string> issuer_secrets_;

  mutable std::mutex mutex_;
  std::vector<UsageEvent> events_;
  std::set<std::string> seen_sessions_;
  std::vector<std::string> notice_log_;
  std::deque<UsageReport> retry_queue_;
};

}  // namespace meshkit
