// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "meshkit/manifest.hpp"
#include "meshkit/pid.hpp"

namespace meshkit {

enum class ProvenanceSource { platform_api, contributor, hub_supplement };

std::string_view provenance_source_name(ProvenanceSource s);
std::optional<ProvenanceSource> provenance_source_from(std::string_view name);

/// One provenance event. `applied` is false for rejected overwrite
/// attempts, which are recorded but leave the value unchanged.
struct ProvenanceEntry {
  std::string field;
  ProvenanceSource source = ProvenanceSource::platform_api;
  int64_t timestamp = 0;
  bool applied = true;
};

enum class RecordVisibility { public_, private_ };

/// One Data Mesh Metadata entry.
struct DmmRecord {
  Pid mesh_pid;
  DataObjectType object_type = DataObjectType::dataset;
  std::string hosting_platform_id;
  Pid primary_platform_pid;
  std::vector<Pid> publication_dois;
  nlohmann::json metadata = nlohmann::json::object();
  RecordVisibility visibility = RecordVisibility::public_;
  std::string license;
  std::vector<ProvenanceEntry> provenance;
};

nlohmann::json record_to_json(const DmmRecord& r);
DmmRecord record_from_json(const nlohmann::json& j);

enum class SubmissionChannel {
  platform_harvest,
  contributor_portal,
  contributor_api,
};

std::optional<SubmissionChannel> submission_channel_from(std::string_view name);

struct RegistrationRequest {
  DataObjectType object_type = DataObjectType::dataset;
  std::string hosting_platform_id;
  Pid primary_platform_pid;
  nlohmann::json metadata = nlohmann::json::object();
  SubmissionChannel submitted_by = SubmissionChannel::platform_harvest;
};

/// Empty iff every required field is present with the declared kind and,
/// for controlled terms, an in-vocabulary value. Codes: MISSING_FIELD,
/// WRONG_KIND, BAD_TERM.
std::vector<Violation> validate_against_schema(const nlohmann::json& metadata,
                                               const MetadataSchema& schema);

struct QueryFilter {
  std::optional<DataObjectType> object_type;
  std::optional<std::string> hosting_platform_id;
  std::optional<std::string> text;  // case-insensitive over title+description
};

struct QueryPage {
  std::vector<DmmRecord> records;
  std::optional<std::string> next_cursor;
};

struct RegistrationOutcome {
  DmmRecord record;
  bool created = false;  // a new mesh PID was minted
  bool changed = false;  // the stored record differs from before
};

/// The Data Mesh Metadata Service. Registration and supplement are
/// serialized behind one mutex (single-writer per record is implied);
/// reads see committed state only. Persistence is an append-only JSONL
/// journal replayed at startup; an empty path keeps the registry
/// in-memory.
class Registry {
 public:
  explicit Registry(MeshManifest manifest, std::string journal_path = "");

  /// Platforms must be enrolled before their objects can register.
  /// Eligibility is (re)checked at registration time.
  void enroll_platform(PlatformDescriptor p);
  std::optional<PlatformDescriptor> platform(const std::string& id) const;
  std::vector<PlatformDescriptor> platforms() const;

  /// Validates, mints (or reuses) the mesh PID, stores, journals.
  /// Idempotency key is (hosting_platform_id, primary_platform_pid):
  /// re-registering updates in place and never mints a second mesh PID.
  RegistrationOutcome register_object(const RegistrationRequest& req);

  /// Merges `fields` under source-precedence rules
  /// (hub_supplement < platform_api < contributor); rejected overwrites
  /// are recorded in provenance with applied=false.
  DmmRecord supplement_metadata(const Pid& mesh_pid,
                                const nlohmann::json& fields,
                                ProvenanceSource source);

  /// `caller` present means an authenticated mesh member; private records
  /// are withheld from anonymous callers.
  DmmRecord get_record(const Pid& mesh_pid,
                       const std::optional<std::string>& caller) const;

  QueryPage query_records(const QueryFilter& filter,
                          const std::optional<std::string>& cursor,
                          size_t page_size,
                          const std::optional<std::string>& caller) const;

  /// Registry-wide invariant sweep; empty means every stored record
  /// satisfies the DmmRecord invariants.
  std::vector<Violation> audit() const;

  ResolverTable& resolver() { return resolver_; }
  const MeshManifest& manifest() const { return manifest_; }
  size_t record_count() const;

 private:
  void commit_locked(const DmmRecord& record);
  void index_locked(const DmmRecord& record);

  MeshManifest manifest_;
  std::string journal_path_;
  PidMinter minter_;
  ResolverTable resolver_;

  mutable std::mutex mutex_;
  std::map<std::string, DmmRecord> records_;        // mesh pid text -> record
  std::map<std::string, std::string> by_source_;    // host "\x1f" primary -> mesh pid
  std::map<std::string, PlatformDescriptor> platforms_;
};

}  // namespace meshkit
