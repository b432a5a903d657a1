// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace meshkit {

/// Object types a mesh may index. The enumeration is closed; a manifest
/// declares the subset it supports.
enum class DataObjectType {
  dataset,
  study,
  clinical_trial,
  participant_clinical,
  participant_omics,
  participant_imaging,
  sequence_file,
  imaging_object,
};

std::string_view object_type_name(DataObjectType t);
std::optional<DataObjectType> object_type_from(std::string_view name);
const std::vector<DataObjectType>& all_object_types();

/// Access tiers, totally ordered: open < registered < controlled.
enum class AccessTier { open, registered, controlled };

std::string_view access_tier_name(AccessTier t);
std::optional<AccessTier> access_tier_from(std::string_view name);

enum class FieldKind { text, integer, date, pid, doi_list, controlled_term };

std::string_view field_kind_name(FieldKind k);
std::optional<FieldKind> field_kind_from(std::string_view name);

struct RequiredField {
  std::string name;
  FieldKind kind = FieldKind::text;

  bool operator==(const RequiredField&) const = default;
};

/// The minimum metadata contract for one object type.
struct MetadataSchema {
  DataObjectType object_type = DataObjectType::dataset;
  std::vector<RequiredField> required_fields;
  std::map<std::string, std::set<std::string>> controlled_vocabularies;

  bool operator==(const MetadataSchema&) const = default;
};

enum class DmmVisibility { public_, mixed, private_ };

std::string_view dmm_visibility_name(DmmVisibility v);
std::optional<DmmVisibility> dmm_visibility_from(std::string_view name);

enum class LinkageMode { none, guid };
enum class FormalityLevel { informal, moderate, formal };

std::string_view formality_level_name(FormalityLevel l);
std::optional<FormalityLevel> formality_level_from(std::string_view name);

/// A violation found by validate_manifest or schema validation. Codes are
/// stable strings (MISSING_SCHEMA, INVALID_NAMESPACE, ...).
struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// The mesh's shared governance contract. Immutable after load; all
/// operations over it are pure.
struct MeshManifest {
  std::string mesh_id;
  std::set<DataObjectType> supported_types;
  std::map<DataObjectType, MetadataSchema> schemas;
  std::vector<std::string> security_requirements;
  bool usage_stats_required = true;
  DmmVisibility dmm_visibility = DmmVisibility::public_;
  std::map<std::string, FormalityLevel> formality;
  LinkageMode linkage_mode = LinkageMode::none;
  std::string default_license = "public-domain-dedication";
  std::string usage_collection_notice =
      "This data hub records usage statistics and returns them to the "
      "platforms hosting the data.";
};

/// A platform as the mesh sees it for eligibility purposes.
struct PlatformDescriptor {
  std::string platform_id;
  std::string endpoint;
  std::set<std::string> attested_requirements;
  std::set<AccessTier> access_tiers_served;
};

struct EligibilityDecision {
  bool eligible = false;
  std::set<std::string> missing;
};

/// Empty result iff every MeshManifest invariant holds. Violations carry
/// stable codes; nothing throws.
std::vector<Violation> validate_manifest(const MeshManifest& m);

/// The schema registered for `t`. Throws MeshError(unsupported_object_type)
/// when `t` is not in supported_types.
const MetadataSchema& minimum_schema_for(const MeshManifest& m,
                                         DataObjectType t);

/// eligible iff the manifest's security requirements are a subset of the
/// platform's attestations; `missing` is the set difference.
EligibilityDecision check_platform_eligibility(const MeshManifest& m,
                                               const PlatformDescriptor& p);

/// The default minimum schema shipped for `t`: title, description,
/// object_type, hosting_platform_id, primary_platform_pid, access_tier,
/// plus study_id and publication_dois for study/clinical_trial.
MetadataSchema default_schema_for(DataObjectType t);

nlohmann::json manifest_to_json(const MeshManifest& m);
MeshManifest manifest_from_json(const nlohmann::json& j);

/// Loads and parses a manifest file. Throws MeshError(bad_fixture) naming
/// the path on I/O or parse failure.
MeshManifest load_manifest(const std::string& path);

nlohmann::json schema_to_json(const MetadataSchema& s);
MetadataSchema schema_from_json(const nlohmann::json& j);

}  // namespace meshkit
