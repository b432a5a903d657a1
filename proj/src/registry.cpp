// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include "meshkit/errors.hpp"
#include "meshkit/token.hpp"

namespace meshkit {

namespace {

int source_rank(ProvenanceSource s) {
  switch (s) {
    case ProvenanceSource::hub_supplement: return 0;
    case ProvenanceSource::platform_api: return 1;
    case ProvenanceSource::contributor: return 2;
  }
  return 0;
}

std::string source_key(const std::string& host, const std::string& primary) {
  return host + '\x1f' + primary;
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  return lowered(haystack).find(lowered(needle)) != std::string::npos;
}

/// Last applied source per field, derived from provenance order.
std::map<std::string, ProvenanceSource> field_sources(const DmmRecord& r) {
  std::map<std::string, ProvenanceSource> out;
  for (const auto& p : r.provenance) {
    if (p.applied) out[p.field] = p.source;
  }
  return out;
}

std::vector<Pid> extract_dois(const nlohmann::json& metadata) {
  std::vector<Pid> out;
  if (!metadata.contains("publication_dois")) return out;
  const auto& v = metadata.at("publication_dois");
  if (!v.is_array()) return out;
  for (const auto& item : v) {
    if (!item.is_string()) continue;
    try {
      auto pid = parse_pid(item.get<std::string>());
      if (pid.scheme == PidScheme::doi) out.push_back(std::move(pid));
    } catch (const MeshError&) {
      // schema validation already rejected malformed doi_list entries
    }
  }
  return out;
}

}  // namespace

std::string_view provenance_source_name(ProvenanceSource s) {
  switch (s) {
    case ProvenanceSource::platform_api: return "platform_api";
    case ProvenanceSource::contributor: return "contributor";
    case ProvenanceSource::hub_supplement: return "hub_supplement";
  }
  return "platform_api";
}

std::optional<ProvenanceSource> provenance_source_from(std::string_view name) {
  if (name == "platform_api") return ProvenanceSource::platform_api;
  if (name == "contributor") return ProvenanceSource::contributor;
  if (name == "hub_supplement") return ProvenanceSource::hub_supplement;
  return std::nullopt;
}

std::optional<SubmissionChannel> submission_channel_from(
    std::string_view name) {
  if (name == "platform_harvest") return SubmissionChannel::platform_harvest;
  if (name == "contributor_portal") return SubmissionChannel::contributor_portal;
  if (name == "contributor_api") return SubmissionChannel::contributor_api;
  return std::nullopt;
}

nlohmann::json record_to_json(const DmmRecord& r) {
  nlohmann::json dois = nlohmann::json::array();
  for (const auto& d : r.publication_dois) dois.push_back(d.render());
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& p : r.provenance) {
    prov.push_back({{"field", p.field},
                    {"source", provenance_source_name(p.source)},
                    {"timestamp", p.timestamp},
                    {"applied", p.applied}});
  }
  bool no_primary =
      r.primary_platform_pid.ns.empty() && r.primary_platform_pid.suffix.empty();
  return {{"mesh_pid", r.mesh_pid.render()},
          {"object_type", object_type_name(r.object_type)},
          {"hosting_platform_id", r.hosting_platform_id},
          {"primary_platform_pid",
           no_primary ? std::string() : r.primary_platform_pid.render()},
          {"publication_dois", dois},
          {"metadata", r.metadata},
          {"visibility",
           r.visibility == RecordVisibility::public_ ? "public" : "private"},
          {"license", r.license},
          {"provenance", prov}};
}

DmmRecord record_from_json(const nlohmann::json& j) {
  DmmRecord r;
  r.mesh_pid = parse_pid(j.at("mesh_pid").get<std::string>());
  auto ot = object_type_from(j.at("object_type").get<std::string>());
  if (!ot) {
    throw MeshError(ErrorCode::bad_fixture,
                    "unknown object_type in record: " +
                        j.at("object_type").get<std::string>());
  }
  r.object_type = *ot;
  r.hosting_platform_id = j.at("hosting_platform_id").get<std::string>();
  // A journal mutated to break Pillar 8 may carry an empty primary PID;
  // loading must not reject it, the audit/conformance side reports it.
  auto primary = j.at("primary_platform_pid").get<std::string>();
  if (!primary.empty()) {
    try {
      r.primary_platform_pid = parse_pid(primary);
    } catch (const MeshError&) {
      r.primary_platform_pid = Pid{};
    }
  } else {
    r.primary_platform_pid = Pid{};
  }
  for (const auto& d : j.value("publication_dois", nlohmann::json::array())) {
    try {
      r.publication_dois.push_back(parse_pid(d.get<std::string>()));
    } catch (const MeshError&) {
    }
  }
  r.metadata = j.value("metadata", nlohmann::json::object());
  r.visibility = j.value("visibility", std::string("public")) == "private"
                     ? RecordVisibility::private_
                     : RecordVisibility::public_;
  // A journal mutated to break Pillar 10 may omit the license entirely.
  r.license = j.value("license", std::string());
  for (const auto& p : j.value("provenance", nlohmann::json::array())) {
    ProvenanceEntry e;
    e.field = p.at("field").get<std::string>();
    e.source = provenance_source_from(p.at("source").get<std::string>())
                   .value_or(ProvenanceSource::platform_api);
    e.timestamp = p.at("timestamp").get<int64_t>();
    e.applied = p.value("applied", true);
    r.provenance.push_back(std::move(e));
  }
  return r;
}

std::vector<Violation> validate_against_schema(const nlohmann::json& metadata,
                                               const MetadataSchema& schema) {
  std::vector<Violation> out;
  static const std::regex date_re(R"(^\d{4}-\d{2}-\d{2}$)");

  for (const auto& field : schema.required_fields) {
    if (!metadata.is_object() || !metadata.contains(field.name)) {
      out.push_back({"MISSING_FIELD", "required field \"" + field.name +
                                          "\" is missing"});
      continue;
    }
    const auto& value = metadata.at(field.name);
    auto wrong = [&](const std::string& why) {
      out.push_back({"WRONG_KIND", "field \"" + field.name + "\": " + why});
    };
    switch (field.kind) {
      case FieldKind::text:
        if (!value.is_string() || value.get<std::string>().empty()) {
          wrong("expected nonempty text");
        }
        break;
      case FieldKind::integer:
        if (!value.is_number_integer()) wrong("expected an integer");
        break;
      case FieldKind::date:
        if (!value.is_string() ||
            !std::regex_match(value.get<std::string>(), date_re)) {
          wrong("expected a date (YYYY-MM-DD)");
        }
        break;
      case FieldKind::pid:
        if (!value.is_string()) {
          wrong("expected a PID string");
        } else {
          try {
            parse_pid(value.get<std::string>());
          } catch (const MeshError& e) {
            wrong(e.message());
          }
        }
        break;
      case FieldKind::doi_list:
        if (!value.is_array()) {
          wrong("expected a list of DOI strings");
        } else {
          for (const auto& item : value) {
            if (!item.is_string()) {
              wrong("doi_list entries must be strings");
              break;
            }
            try {
              auto pid = parse_pid(item.get<std::string>());
              if (pid.scheme != PidScheme::doi) {
                wrong("\"" + item.get<std::string>() + "\" is not a doi PID");
                break;
              }
            } catch (const MeshError&) {
              wrong("\"" + item.get<std::string>() + "\" is not a doi PID");
              break;
            }
          }
        }
        break;
      case FieldKind::controlled_term: {
        if (!value.is_string()) {
          wrong("expected a controlled term");
          break;
        }
        auto vocab = schema.controlled_vocabularies.find(field.name);
        if (vocab != schema.controlled_vocabularies.end() &&
            !vocab->second.count(value.get<std::string>())) {
          out.push_back({"BAD_TERM", "field \"" + field.name + "\": \"" +
                                         value.get<std::string>() +
                                         "\" is not in the vocabulary"});
        }
        break;
      }
    }
  }
  return out;
}

Registry::Registry(MeshManifest manifest, std::string journal_path)
    : manifest_(std::move(manifest)), journal_path_(std::move(journal_path)) {
  if (journal_path_.empty()) return;
  std::ifstream in(journal_path_);
  if (!in) return;  // fresh journal
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || j.value("op", "") != "upsert") {
      throw MeshError(ErrorCode::bad_fixture,
                      "journal " + journal_path_ + " line " +
                          std::to_string(lineno) + " is not an upsert");
    }
    auto record = record_from_json(j.at("record"));
    minter_.reserve(record.mesh_pid);
    index_locked(record);
    records_[record.mesh_pid.render()] = std::move(record);
  }
}

void Registry::enroll_platform(PlatformDescriptor p) {
  std::lock_guard lock(mutex_);
  platforms_[p.platform_id] = p;
  // refresh resolver endpoints for anything this platform already hosts
  for (const auto& [_, record] : records_) {
    if (record.hosting_platform_id == p.platform_id) index_locked(record);
  }
}

std::optional<PlatformDescriptor> Registry::platform(
    const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = platforms_.find(id);
  if (it == platforms_.end()) return std::nullopt;
  return it->second;
}

std::vector<PlatformDescriptor> Registry::platforms() const {
  std::lock_guard lock(mutex_);
  std::vector<PlatformDescriptor> out;
  for (const auto& [_, p] : platforms_) out.push_back(p);
  return out;
}

void Registry::index_locked(const DmmRecord& record) {
  by_source_[source_key(record.hosting_platform_id,
                        record.primary_platform_pid.render())] =
      record.mesh_pid.render();
  std::string endpoint;
  if (auto it = platforms_.find(record.hosting_platform_id);
      it != platforms_.end()) {
    endpoint = it->second.endpoint;
  }
  if (!record.primary_platform_pid.suffix.empty()) {
    resolver_.put({record.mesh_pid, record.hosting_platform_id, endpoint,
                   record.primary_platform_pid});
    resolver_.put({record.primary_platform_pid, record.hosting_platform_id,
                   endpoint, std::nullopt});
  }
}

void Registry::commit_locked(const DmmRecord& record) {
  index_locked(record);
  records_[record.mesh_pid.render()] = record;
  if (journal_path_.empty()) return;
  std::ofstream out(journal_path_, std::ios::app);
  if (!out) {
    throw MeshError(ErrorCode::internal,
                    "cannot append to journal " + journal_path_);
  }
  out << nlohmann::json{{"op", "upsert"},
                        {"ts", unix_now()},
                        {"record", record_to_json(record)}}
             .dump()
      << '\n';
}

RegistrationOutcome Registry::register_object(const RegistrationRequest& req) {
  if (!manifest_.supported_types.count(req.object_type)) {
    throw MeshError(ErrorCode::unsupported_object_type,
                    std::string(object_type_name(req.object_type)) +
                        " is not supported by mesh " + manifest_.mesh_id);
  }
  const auto& schema = minimum_schema_for(manifest_, req.object_type);

  std::lock_guard lock(mutex_);
  auto platform_it = platforms_.find(req.hosting_platform_id);
  if (platform_it == platforms_.end()) {
    throw MeshError(ErrorCode::unknown_platform,
                    "platform \"" + req.hosting_platform_id +
                        "\" is not enrolled in the mesh");
  }
  auto eligibility = check_platform_eligibility(manifest_, platform_it->second);
  if (!eligibility.eligible) {
    std::string missing;
    for (const auto& r : eligibility.missing) {
      if (!missing.empty()) missing += ", ";
      missing += r;
    }
    throw MeshError(ErrorCode::ineligible_platform,
                    "platform \"" + req.hosting_platform_id +
                        "\" is missing attestations: " + missing);
  }
  auto violations = validate_against_schema(req.metadata, schema);
  if (!violations.empty()) {
    std::string detail;
    for (const auto& v : violations) {
      if (!detail.empty()) detail += "; ";
      detail += v.code + " " + v.message;
    }
    throw MeshError(ErrorCode::schema_violation, detail);
  }

  auto key = source_key(req.hosting_platform_id,
                        req.primary_platform_pid.render());
  auto existing = by_source_.find(key);

  RecordVisibility visibility = RecordVisibility::public_;
  if (manifest_.dmm_visibility == DmmVisibility::private_) {
    visibility = RecordVisibility::private_;
  } else if (manifest_.dmm_visibility == DmmVisibility::mixed &&
             req.metadata.value("visibility", "public") == "private") {
    visibility = RecordVisibility::private_;
  }
  auto source = req.submitted_by == SubmissionChannel::platform_harvest
                    ? ProvenanceSource::platform_api
                    : ProvenanceSource::contributor;
  auto now = unix_now();

  RegistrationOutcome outcome;
  if (existing == by_source_.end()) {
    DmmRecord record;
    record.mesh_pid = minter_.mint(PidScheme::mesh, manifest_.mesh_id);
    record.object_type = req.object_type;
    record.hosting_platform_id = req.hosting_platform_id;
    record.primary_platform_pid = req.primary_platform_pid;
    record.metadata = req.metadata;
    record.publication_dois = extract_dois(req.metadata);
    record.visibility = visibility;
    record.license = manifest_.default_license;
    for (const auto& [field, _] : req.metadata.items()) {
      record.provenance.push_back({field, source, now, true});
    }
    commit_locked(record);
    outcome = {record, true, true};
  } else {
    DmmRecord record = records_.at(existing->second);
    bool changed = false;
    for (const auto& [field, value] : req.metadata.items()) {
      if (!record.metadata.contains(field) ||
          record.metadata.at(field) != value) {
        record.metadata[field] = value;
        record.provenance.push_back({field, source, now, true});
        changed = true;
      }
    }
    if (record.object_type != req.object_type) {
      record.object_type = req.object_type;
      changed = true;
    }
    if (record.visibility != visibility) {
      record.visibility = visibility;
      changed = true;
    }
    if (changed) {
      record.publication_dois = extract_dois(record.metadata);
      commit_locked(record);
    }
    outcome = {record, false, changed};
  }
  return outcome;
}

DmmRecord Registry::supplement_metadata(const Pid& mesh_pid,
                                        const nlohmann::json& fields,
                                        ProvenanceSource source) {
  std::lock_guard lock(mutex_);
  auto it = records_.find(mesh_pid.render());
  if (it == records_.end()) {
    throw MeshError(ErrorCode::unknown_pid,
                    "no DMM record for " + mesh_pid.render());
  }
  DmmRecord record = it->second;
  auto sources = field_sources(record);
  auto now = unix_now();
  bool changed = false;
  for (const auto& [field, value] : fields.items()) {
    auto current = sources.find(field);
    bool present = record.metadata.contains(field);
    if (present && record.metadata.at(field) == value) continue;  // no-op
    bool allowed = !present || current == sources.end() ||
                   source_rank(source) >= source_rank(current->second);
    record.provenance.push_back({field, source, now, allowed});
    if (allowed) {
      record.metadata[field] = value;
      changed = true;
    } else {
      changed = true;  // the rejected attempt itself is journaled
    }
  }
  if (changed) {
    record.publication_dois = extract_dois(record.metadata);
    commit_locked(record);
  }
  return record;
}

DmmRecord Registry::get_record(const Pid& mesh_pid,
                               const std::optional<std::string>& caller) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(mesh_pid.render());
  if (it == records_.end()) {
    throw MeshError(ErrorCode::unknown_pid,
                    "no DMM record for " + mesh_pid.render());
  }
  if (it->second.visibility == RecordVisibility::private_ && !caller) {
    throw MeshError(ErrorCode::not_authorized,
                    "record " + mesh_pid.render() +
                        " is private to authenticated mesh members");
  }
  return it->second;
}

QueryPage Registry::query_records(
    const QueryFilter& filter, const std::optional<std::string>& cursor,
    size_t page_size, const std::optional<std::string>& caller) const {
  size_t offset = 0;
  if (cursor && !cursor->empty()) {
    if (!std::all_of(cursor->begin(), cursor->end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      throw MeshError(ErrorCode::malformed_cursor,
                      "cursor \"" + *cursor + "\" is not a page offset");
    }
    offset = std::stoull(*cursor);
  }
  if (page_size == 0) page_size = 1;

  std::vector<const DmmRecord*> matched;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [_, record] : records_) {
      if (record.visibility == RecordVisibility::private_ && !caller) continue;
      if (filter.object_type && record.object_type != *filter.object_type) {
        continue;
      }
      if (filter.hosting_platform_id &&
          record.hosting_platform_id != *filter.hosting_platform_id) {
        continue;
      }
      if (filter.text && !filter.text->empty()) {
        auto title = record.metadata.value("title", std::string());
        auto description = record.metadata.value("description", std::string());
        if (!contains_ci(title, *filter.text) &&
            !contains_ci(description, *filter.text)) {
          continue;
        }
      }
      matched.push_back(&record);
    }
    std::sort(matched.begin(), matched.end(),
              [](const DmmRecord* a, const DmmRecord* b) {
                if (a->object_type != b->object_type) {
                  return a->object_type < b->object_type;
                }
                return a->mesh_pid.render() < b->mesh_pid.render();
              });
    QueryPage page;
    for (size_t i = offset; i < matched.size() && i < offset + page_size; ++i) {
      page.records.push_back(*matched[i]);
    }
    if (offset + page_size < matched.size()) {
      page.next_cursor = std::to_string(offset + page_size);
    }
    return page;
  }
}

std::vector<Violation> Registry::audit() const {
  std::lock_guard lock(mutex_);
  std::vector<Violation> out;
  std::map<std::string, std::string> seen_sources;
  for (const auto& [key, record] : records_) {
    auto where = " (record " + key + ")";
    if (record.mesh_pid.scheme != PidScheme::mesh) {
      out.push_back({"BAD_MESH_PID", "mesh PID has non-mesh scheme" + where});
    }
    if (record.mesh_pid.ns != manifest_.mesh_id) {
      out.push_back({"BAD_MESH_PID",
                     "mesh PID namespace is not the mesh id" + where});
    }
    if (record.primary_platform_pid.suffix.empty()) {
      out.push_back({"MISSING_PRIMARY_PID",
                     "no primary platform PID" + where});
    }
    if (manifest_.supported_types.count(record.object_type)) {
      for (const auto& v : validate_against_schema(
               record.metadata, manifest_.schemas.at(record.object_type))) {
        out.push_back({v.code, v.message + where});
      }
    } else {
      out.push_back({"UNSUPPORTED_TYPE",
                     std::string(object_type_name(record.object_type)) +
                         " is not in the manifest" + where});
    }
    if (record.visibility == RecordVisibility::public_ &&
        record.license.empty()) {
      out.push_back({"MISSING_LICENSE", "public record has no license" + where});
    }
    auto src = source_key(record.hosting_platform_id,
                          record.primary_platform_pid.render());
    auto [it, inserted] = seen_sources.emplace(src, key);
    if (!inserted) {
      out.push_back({"DUPLICATE_SOURCE",
                     "records " + it->second + " and " + key +
                         " share (hosting platform, primary PID)"});
    }
  }
  return out;
}

size_t Registry::record_count() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace meshkit
