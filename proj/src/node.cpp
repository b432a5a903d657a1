// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/node.hpp"

#include <algorithm>
#include <fstream>

#include "meshkit/crypto.hpp"
#include "meshkit/errors.hpp"

namespace meshkit {

NodeConfig NodeConfig::from_json(const nlohmann::json& j) {
  NodeConfig c;
  c.platform_id = j.at("platform_id").get<std::string>();
  c.license = j.value("license", c.license);
  c.issuer_secret = j.at("issuer_secret").get<std::string>();
  if (j.contains("trusted_issuers")) {
    for (const auto& [issuer, secret] : j.at("trusted_issuers").items()) {
      c.trusted_issuers[issuer] = secret.get<std::string>();
    }
  }
  c.trusted_issuers[c.platform_id] = c.issuer_secret;
  c.token_ttl_seconds = j.value("token_ttl_seconds", c.token_ttl_seconds);
  for (const auto& r : j.value("attested_requirements", nlohmann::json::array())) {
    c.attested_requirements.insert(r.get<std::string>());
  }
  for (const auto& t : j.value("access_tiers_served", nlohmann::json::array())) {
    auto tier = access_tier_from(t.get<std::string>());
    if (!tier) {
      throw MeshError(ErrorCode::bad_fixture,
                      "unknown access tier: " + t.get<std::string>());
    }
    c.access_tiers_served.insert(*tier);
  }
  for (const auto& a : j.value("authorized_aaes", nlohmann::json::array())) {
    c.authorized_aaes.insert(a.get<std::string>());
  }
  c.requires_result_review =
      j.value("requires_result_review", c.requires_result_review);
  c.federated_enabled = j.value("federated_enabled", c.federated_enabled);
  c.usage_reports_opt_out =
      j.value("usage_reports_opt_out", c.usage_reports_opt_out);
  for (const auto& u : j.value("users", nlohmann::json::array())) {
    UserRecord user;
    user.username = u.at("username").get<std::string>();
    user.secret = u.at("secret").get<std::string>();
    user.registered = u.value("registered", false);
    for (const auto& v : u.value("visas", nlohmann::json::array())) {
      user.visas.emplace_back(v.at("scope").get<std::string>(),
                              v.value("expiry_seconds", int64_t{3600}));
    }
    c.users.push_back(std::move(user));
  }
  for (const auto& o : j.value("objects", nlohmann::json::array())) {
    HostedObject obj;
    obj.pid = o.at("pid").get<std::string>();
    auto ot = object_type_from(o.at("object_type").get<std::string>());
    if (!ot) {
      throw MeshError(ErrorCode::bad_fixture,
                      "unknown object_type: " +
                          o.at("object_type").get<std::string>());
    }
    obj.object_type = *ot;
    obj.metadata = o.value("metadata", nlohmann::json::object());
    auto tier = access_tier_from(o.at("access_tier").get<std::string>());
    if (!tier) {
      throw MeshError(ErrorCode::bad_fixture,
                      "unknown access_tier: " +
                          o.at("access_tier").get<std::string>());
    }
    obj.access_tier = *tier;
    obj.content = o.value("content", std::string());
    // A mutated fixture may declare a checksum/size that disagrees with
    // the content; the node serves what the fixture says.
    obj.checksum = o.contains("checksum") ? o.at("checksum").get<std::string>()
                                          : crypto::sha256_hex(obj.content);
    obj.size = o.contains("size") ? o.at("size").get<uint64_t>()
                                  : obj.content.size();
    if (o.contains("constraints")) {
      const auto& k = o.at("constraints");
      obj.constraints.downloadable_out_of_aae =
          k.value("downloadable_out_of_aae", false);
      obj.constraints.redistributable = k.value("redistributable", false);
    }
    for (const auto& s : o.value("subject_ids", nlohmann::json::array())) {
      obj.subject_ids.push_back(s.get<std::string>());
    }
    c.objects.push_back(std::move(obj));
  }
  if (j.contains("faults")) {
    for (const auto& f : j.at("faults")) {
      auto name = f.get<std::string>();
      if (name == "drop_metadata_endpoint") {
        c.faults.drop_metadata_endpoint = true;
      } else if (name == "authz_always_grant") {
        c.faults.authz_always_grant = true;
      } else if (name == "transfer_any_aae") {
        c.faults.transfer_any_aae = true;
      } else {
        throw MeshError(ErrorCode::bad_fixture, "unknown fault: " + name);
      }
    }
  }
  return c;
}

NodeConfig NodeConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MeshError(ErrorCode::bad_fixture, "cannot open node fixture " + path);
  }
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(ErrorCode::bad_fixture,
                    "node fixture " + path + " does not parse: " + e.what());
  }
}

PlatformDescriptor NodeConfig::descriptor(const std::string& endpoint) const {
  return {platform_id, endpoint, attested_requirements, access_tiers_served};
}

PlatformNode::PlatformNode(NodeConfig config, std::string audit_log_path)
    : config_(std::move(config)),
      codec_(config_.trusted_issuers),
      audit_log_path_(std::move(audit_log_path)) {
  for (const auto& obj : config_.objects) {
    objects_[obj.pid] = obj;
  }
}

const HostedObject& PlatformNode::find_object(const std::string& pid) const {
  auto it = objects_.find(pid);
  if (it == objects_.end()) {
    throw MeshError(ErrorCode::unknown_pid,
                    "no object " + pid + " on platform " + config_.platform_id);
  }
  return it->second;
}

std::string PlatformNode::authenticate(const std::string& username,
                                       const std::string& secret) const {
  auto user = std::find_if(
      config_.users.begin(), config_.users.end(),
      [&](const UserRecord& u) { return u.username == username; });
  if (user == config_.users.end() || user->secret != secret) {
    throw MeshError(ErrorCode::bad_credentials,
                    "unknown user or wrong secret");
  }
  auto now = unix_now();
  Token token;
  token.subject = user->username;
  token.issuer = config_.platform_id;
  token.expiry = now + config_.token_ttl_seconds;
  token.registered = user->registered;
  for (const auto& [scope, expiry_seconds] : user->visas) {
    Visa visa;
    visa.scope_pid = parse_pid(scope);
    visa.issuer = config_.platform_id;
    visa.expiry = now + expiry_seconds;
    token.visas.push_back(std::move(visa));
  }
  return codec_.encode(token, config_.platform_id);
}

std::pair<nlohmann::json, std::vector<TypedLink>> PlatformNode::get_metadata(
    const std::string& pid) const {
  const auto& obj = find_object(pid);
  nlohmann::json metadata = obj.metadata;
  metadata["object_type"] = object_type_name(obj.object_type);
  metadata["hosting_platform_id"] = config_.platform_id;
  metadata["primary_platform_pid"] = obj.pid;
  metadata["access_tier"] = access_tier_name(obj.access_tier);
  std::vector<TypedLink> links = {
      {"data", base_url_ + "/objects/" + pid + "/access"},
      {"license", config_.license},
  };
  return {std::move(metadata), std::move(links)};
}

AccessGrant PlatformNode::authorize(
    const std::optional<std::string>& token_wire, const std::string& pid) const {
  const auto& obj = find_object(pid);
  auto grant = [&](const std::string& reason) {
    return AccessGrant{pid, true, obj.constraints, reason};
  };
  auto deny = [&](const std::string& reason) {
    return AccessGrant{pid, false, std::nullopt, reason};
  };

  if (config_.faults.authz_always_grant) return grant("always-grant fault");
  if (obj.access_tier == AccessTier::open) return grant("open access");

  auto now = unix_now();
  std::optional<Token> token;
  if (token_wire && !token_wire->empty()) {
    token = codec_.verify(*token_wire, now);
    if (!token) return deny("invalid token");
  } else {
    return deny("authentication required");
  }

  if (obj.access_tier == AccessTier::registered) {
    if (token->registered) return grant("registered user");
    return deny("registration required");
  }

  // controlled
  try {
    auto obj_pid = parse_pid(pid);
    if (token->visa_for(obj_pid, config_.platform_id, now)) {
      return grant("visa");
    }
  } catch (const MeshError&) {
    // unparseable object id never matches a visa scope
  }
  return deny("missing visa");
}

DataDescriptor PlatformNode::get_data(
    const std::optional<std::string>& token_wire, const std::string& pid) const {
  auto decision = authorize(token_wire, pid);
  if (!decision.granted) {
    throw MeshError(ErrorCode::not_authorized, decision.reason);
  }
  const auto& obj = find_object(pid);
  return {pid, obj.checksum, obj.size, base_url_ + "/objects/" + pid + "/data"};
}

std::string PlatformNode::read_content(
    const std::optional<std::string>& token_wire, const std::string& pid) {
  auto decision = authorize(token_wire, pid);
  if (!decision.granted) {
    throw MeshError(ErrorCode::not_authorized, decision.reason);
  }
  const auto& obj = find_object(pid);
  std::string subject;
  if (token_wire) {
    if (auto t = codec_.verify(*token_wire, unix_now())) subject = t->subject;
  }
  append_audit({{"timestamp", unix_now()},
                {"op", "data"},
                {"pid", pid},
                {"subject", subject}});
  return obj.content;
}

TransferGrant PlatformNode::transfer_to_aae(
    const std::string& pid, const std::string& aae_id,
    const std::optional<std::string>& token_wire) {
  const auto& obj = find_object(pid);
  auto decision = authorize(token_wire, pid);
  if (!decision.granted) {
    throw MeshError(ErrorCode::not_authorized, decision.reason);
  }
  if (!config_.faults.transfer_any_aae &&
      !config_.authorized_aaes.count(aae_id)) {
    throw MeshError(ErrorCode::aae_not_authorized,
                    "analysis environment \"" + aae_id +
                        "\" is not authorized by platform " +
                        config_.platform_id);
  }
  std::string subject;
  if (token_wire) {
    if (auto t = codec_.verify(*token_wire, unix_now())) subject = t->subject;
  }
  append_audit({{"timestamp", unix_now()},
                {"op", "transfer"},
                {"pid", pid},
                {"subject", subject},
                {"aae_id", aae_id}});
  return {pid, aae_id, obj.constraints,
          base_url_ + "/objects/" + pid + "/data"};
}

ObjectPage PlatformNode::list_objects(const std::optional<std::string>& cursor,
                                      size_t page_size) const {
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
  ObjectPage page;
  size_t i = 0;
  for (const auto& [pid, _] : objects_) {  // std::map keeps this deterministic
    if (i >= offset && i < offset + page_size) page.pids.push_back(pid);
    ++i;
  }
  if (offset + page_size < objects_.size()) {
    page.next_cursor = std::to_string(offset + page_size);
  }
  return page;
}

nlohmann::json PlatformNode::execute_computation(
    const nlohmann::json& computation,
    const std::optional<std::string>& token_wire) const {
  if (!config_.federated_enabled) {
    throw MeshError(ErrorCode::federated_disabled,
                    "platform " + config_.platform_id +
                        " does not accept federated workflows");
  }
  std::optional<DataObjectType> type_filter;
  if (computation.contains("filter")) {
    const auto& f = computation.at("filter");
    if (f.contains("object_type")) {
      type_filter = object_type_from(f.at("object_type").get<std::string>());
      if (!type_filter) {
        throw MeshError(ErrorCode::bad_fixture,
                        "unknown object_type in filter: " +
                            f.at("object_type").get<std::string>());
      }
    }
  }
  auto aggregate = computation.value("aggregate", std::string("count"));

  uint64_t count = 0, sum_size = 0;
  std::vector<std::string> checksums;
  for (const auto& [pid, obj] : objects_) {
    if (type_filter && obj.object_type != *type_filter) continue;
    if (!authorize(token_wire, pid).granted) continue;
    ++count;
    sum_size += obj.size;
    checksums.push_back(obj.checksum);
  }
  std::sort(checksums.begin(), checksums.end());

  nlohmann::json value;
  if (aggregate == "count") {
    value = count;
  } else if (aggregate == "sum_size") {
    value = sum_size;
  } else if (aggregate == "checksum_list") {
    value = checksums;
  } else {
    throw MeshError(ErrorCode::bad_fixture,
                    "unknown aggregate \"" + aggregate + "\"");
  }
  return {{"status", "ok"},
          {"value", value},
          {"requires_review", config_.requires_result_review}};
}

void PlatformNode::receive_usage_report(const nlohmann::json& report) {
  auto period = report.value("period", nlohmann::json::object());
  std::string key = std::to_string(period.value("start", int64_t{0})) + ":" +
                    std::to_string(period.value("end", int64_t{0}));
  std::lock_guard lock(mutex_);
  usage_reports_[key] = report;  // idempotent on (platform, period)
}

std::vector<nlohmann::json> PlatformNode::received_usage_reports() const {
  std::lock_guard lock(mutex_);
  std::vector<nlohmann::json> out;
  for (const auto& [_, r] : usage_reports_) out.push_back(r);
  return out;
}

std::vector<nlohmann::json> PlatformNode::audit_entries() const {
  std::lock_guard lock(mutex_);
  return audit_;
}

void PlatformNode::append_audit(nlohmann::json entry) {
  std::lock_guard lock(mutex_);
  if (!audit_log_path_.empty()) {
    std::ofstream out(audit_log_path_, std::ios::app);
    if (out) out << entry.dump() << '\n';
  }
  audit_.push_back(std::move(entry));
}

}  // namespace meshkit
