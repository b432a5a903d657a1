// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "meshkit/errors.hpp"
#include "meshkit/pid.hpp"

namespace meshkit {

namespace {

constexpr std::string_view kObjectTypeNames[] = {
    "dataset",            "study",
    "clinical_trial",     "participant_clinical",
    "participant_omics",  "participant_imaging",
    "sequence_file",      "imaging_object",
};

}  // namespace

std::string_view object_type_name(DataObjectType t) {
  return kObjectTypeNames[static_cast<size_t>(t)];
}

std::optional<DataObjectType> object_type_from(std::string_view name) {
  for (size_t i = 0; i < std::size(kObjectTypeNames); ++i) {
    if (kObjectTypeNames[i] == name) return static_cast<DataObjectType>(i);
  }
  return std::nullopt;
}

const std::vector<DataObjectType>& all_object_types() {
  static const std::vector<DataObjectType> all = [] {
    std::vector<DataObjectType> v;
    for (size_t i = 0; i < std::size(kObjectTypeNames); ++i) {
      v.push_back(static_cast<DataObjectType>(i));
    }
    return v;
  }();
  return all;
}

std::string_view access_tier_name(AccessTier t) {
  switch (t) {
    case AccessTier::open: return "open";
    case AccessTier::registered: return "registered";
    case AccessTier::controlled: return "controlled";
  }
  return "open";
}

std::optional<AccessTier> access_tier_from(std::string_view name) {
  if (name == "open") return AccessTier::open;
  if (name == "registered") return AccessTier::registered;
  if (name == "controlled") return AccessTier::controlled;
  return std::nullopt;
}

std::string_view field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::text: return "text";
    case FieldKind::integer: return "integer";
    case FieldKind::date: return "date";
    case FieldKind::pid: return "pid";
    case FieldKind::doi_list: return "doi_list";
    case FieldKind::controlled_term: return "controlled_term";
  }
  return "text";
}

std::optional<FieldKind> field_kind_from(std::string_view name) {
  if (name == "text") return FieldKind::text;
  if (name == "integer") return FieldKind::integer;
  if (name == "date") return FieldKind::date;
  if (name == "pid") return FieldKind::pid;
  if (name == "doi_list") return FieldKind::doi_list;
  if (name == "controlled_term") return FieldKind::controlled_term;
  return std::nullopt;
}

std::string_view dmm_visibility_name(DmmVisibility v) {
  switch (v) {
    case DmmVisibility::public_: return "public";
    case DmmVisibility::mixed: return "mixed";
    case DmmVisibility::private_: return "private";
  }
  return "public";
}

std::optional<DmmVisibility> dmm_visibility_from(std::string_view name) {
  if (name == "public") return DmmVisibility::public_;
  if (name == "mixed") return DmmVisibility::mixed;
  if (name == "private") return DmmVisibility::private_;
  return std::nullopt;
}

std::string_view formality_level_name(FormalityLevel l) {
  switch (l) {
    case FormalityLevel::informal: return "informal";
    case FormalityLevel::moderate: return "moderate";
    case FormalityLevel::formal: return "formal";
  }
  return "informal";
}

std::optional<FormalityLevel> formality_level_from(std::string_view name) {
  if (name == "informal") return FormalityLevel::informal;
  if (name == "moderate") return FormalityLevel::moderate;
  if (name == "formal") return FormalityLevel::formal;
  return std::nullopt;
}

std::vector<Violation> validate_manifest(const MeshManifest& m) {
  std::vector<Violation> out;
  if (!valid_pid_namespace(m.mesh_id)) {
    out.push_back({"INVALID_NAMESPACE",
                   "mesh_id \"" + m.mesh_id + "\" is not a valid PID namespace"});
  }
  for (auto t : m.supported_types) {
    if (!m.schemas.count(t)) {
      out.push_back({"MISSING_SCHEMA",
                     "no metadata schema for supported type " +
                         std::string(object_type_name(t))});
    }
  }
  for (const auto& [t, schema] : m.schemas) {
    if (!m.supported_types.count(t)) {
      out.push_back({"EXTRA_SCHEMA",
                     "schema for unsupported type " +
                         std::string(object_type_name(t))});
    }
    if (schema.object_type != t) {
      out.push_back({"SCHEMA_TYPE_MISMATCH",
                     "schema keyed " + std::string(object_type_name(t)) +
                         " declares object_type " +
                         std::string(object_type_name(schema.object_type))});
    }
    std::unordered_set<std::string> seen;
    for (const auto& f : schema.required_fields) {
      if (!seen.insert(f.name).second) {
        out.push_back({"DUPLICATE_FIELD",
                       "field \"" + f.name + "\" repeated in " +
                           std::string(object_type_name(t)) + " schema"});
      }
    }
  }
  return out;
}

const MetadataSchema& minimum_schema_for(const MeshManifest& m,
                                         DataObjectType t) {
  if (!m.supported_types.count(t)) {
    throw MeshError(ErrorCode::unsupported_object_type,
                    std::string(object_type_name(t)) +
                        " is not supported by mesh " + m.mesh_id);
  }
  auto it = m.schemas.find(t);
  if (it == m.schemas.end()) {
    throw MeshError(ErrorCode::unsupported_object_type,
                    "mesh " + m.mesh_id + " declares " +
                        std::string(object_type_name(t)) +
                        " but registers no schema for it");
  }
  return it->second;
}

EligibilityDecision check_platform_eligibility(const MeshManifest& m,
                                               const PlatformDescriptor& p) {
  EligibilityDecision d;
  for (const auto& req : m.security_requirements) {
    if (!p.attested_requirements.count(req)) d.missing.insert(req);
  }
  d.eligible = d.missing.empty();
  return d;
}

MetadataSchema default_schema_for(DataObjectType t) {
  MetadataSchema s;
  s.object_type = t;
  s.required_fields = {
      {"title", FieldKind::text},
      {"description", FieldKind::text},
      {"object_type", FieldKind::controlled_term},
      {"hosting_platform_id", FieldKind::text},
      {"primary_platform_pid", FieldKind::pid},
      {"access_tier", FieldKind::controlled_term},
  };
  if (t == DataObjectType::study || t == DataObjectType::clinical_trial) {
    s.required_fields.push_back({"study_id", FieldKind::text});
    s.required_fields.push_back({"publication_dois", FieldKind::doi_list});
  }
  std::set<std::string> type_terms;
  for (auto ot : all_object_types()) {
    type_terms.insert(std::string(object_type_name(ot)));
  }
  s.controlled_vocabularies["object_type"] = std::move(type_terms);
  s.controlled_vocabularies["access_tier"] = {"open", "registered",
                                              "controlled"};
  return s;
}

nlohmann::json schema_to_json(const MetadataSchema& s) {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : s.required_fields) {
    fields.push_back({{"name", f.name}, {"kind", field_kind_name(f.kind)}});
  }
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [field, terms] : s.controlled_vocabularies) {
    vocab[field] = terms;
  }
  return {{"object_type", object_type_name(s.object_type)},
          {"required_fields", fields},
          {"controlled_vocabularies", vocab}};
}

MetadataSchema schema_from_json(const nlohmann::json& j) {
  MetadataSchema s;
  auto ot = object_type_from(j.at("object_type").get<std::string>());
  if (!ot) {
    throw MeshError(ErrorCode::bad_fixture,
                    "unknown object_type in schema: " +
                        j.at("object_type").get<std::string>());
  }
  s.object_type = *ot;
  for (const auto& f : j.at("required_fields")) {
    auto kind = field_kind_from(f.at("kind").get<std::string>());
    if (!kind) {
      throw MeshError(ErrorCode::bad_fixture,
                      "unknown field kind: " + f.at("kind").get<std::string>());
    }
    s.required_fields.push_back({f.at("name").get<std::string>(), *kind});
  }
  if (j.contains("controlled_vocabularies")) {
    for (const auto& [field, terms] : j.at("controlled_vocabularies").items()) {
      std::set<std::string> set;
      for (const auto& t : terms) set.insert(t.get<std::string>());
      s.controlled_vocabularies[field] = std::move(set);
    }
  }
  return s;
}

nlohmann::json manifest_to_json(const MeshManifest& m) {
  nlohmann::json types = nlohmann::json::array();
  for (auto t : m.supported_types) types.push_back(object_type_name(t));
  nlohmann::json schemas = nlohmann::json::object();
  for (const auto& [t, s] : m.schemas) {
    schemas[std::string(object_type_name(t))] = schema_to_json(s);
  }
  nlohmann::json formality = nlohmann::json::object();
  for (const auto& [dim, level] : m.formality) {
    formality[dim] = formality_level_name(level);
  }
  return {{"mesh_id", m.mesh_id},
          {"supported_types", types},
          {"schemas", schemas},
          {"security_requirements", m.security_requirements},
          {"usage_stats_required", m.usage_stats_required},
          {"dmm_visibility", dmm_visibility_name(m.dmm_visibility)},
          {"formality", formality},
          {"linkage_mode", m.linkage_mode == LinkageMode::guid ? "guid" : "none"},
          {"default_license", m.default_license},
          {"usage_collection_notice", m.usage_collection_notice}};
}

MeshManifest manifest_from_json(const nlohmann::json& j) {
  MeshManifest m;
  m.mesh_id = j.at("mesh_id").get<std::string>();
  for (const auto& t : j.at("supported_types")) {
    auto ot = object_type_from(t.get<std::string>());
    if (!ot) {
      throw MeshError(ErrorCode::bad_fixture,
                      "unknown supported type: " + t.get<std::string>());
    }
    m.supported_types.insert(*ot);
  }
  if (j.contains("schemas")) {
    for (const auto& [name, schema] : j.at("schemas").items()) {
      auto ot = object_type_from(name);
      if (!ot) {
        throw MeshError(ErrorCode::bad_fixture,
                        "unknown schema key: " + name);
      }
      m.schemas[*ot] = schema_from_json(schema);
    }
  }
  if (j.contains("security_requirements")) {
    m.security_requirements =
        j.at("security_requirements").get<std::vector<std::string>>();
  }
  m.usage_stats_required = j.value("usage_stats_required", true);
  if (j.contains("dmm_visibility")) {
    auto v = dmm_visibility_from(j.at("dmm_visibility").get<std::string>());
    if (!v) {
      throw MeshError(ErrorCode::bad_fixture,
                      "unknown dmm_visibility: " +
                          j.at("dmm_visibility").get<std::string>());
    }
    m.dmm_visibility = *v;
  }
  if (j.contains("formality")) {
    for (const auto& [dim, level] : j.at("formality").items()) {
      auto l = formality_level_from(level.get<std::string>());
      if (!l) {
        throw MeshError(ErrorCode::bad_fixture,
                        "unknown formality level: " + level.get<std::string>());
      }
      m.formality[dim] = *l;
    }
  }
  auto linkage = j.value("linkage_mode", std::string("none"));
  if (linkage == "guid") {
    m.linkage_mode = LinkageMode::guid;
  } else if (linkage == "none") {
    m.linkage_mode = LinkageMode::none;
  } else {
    throw MeshError(ErrorCode::bad_fixture, "unknown linkage_mode: " + linkage);
  }
  m.default_license = j.value("default_license", m.default_license);
  m.usage_collection_notice =
      j.value("usage_collection_notice", m.usage_collection_notice);
  return m;
}

MeshManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MeshError(ErrorCode::bad_fixture, "cannot open manifest " + path);
  }
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(ErrorCode::bad_fixture,
                    "manifest " + path + " does not parse: " + e.what());
  }
}

}  // namespace meshkit
