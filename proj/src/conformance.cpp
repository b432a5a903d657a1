// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/conformance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "httplib.h"
#include "meshkit/crypto.hpp"
#include "meshkit/errors.hpp"
#include "meshkit/hub.hpp"
#include "meshkit/pid.hpp"
#include "meshkit/registry.hpp"

namespace meshkit {

ProbeConfig ProbeConfig::from_json(const nlohmann::json& j) {
  ProbeConfig p;
  p.open_pid = j.value("open_pid", std::string());
  p.registered_pid = j.value("registered_pid", std::string());
  p.controlled_pid = j.value("controlled_pid", std::string());
  p.registered_username = j.value("registered_username", std::string());
  p.registered_secret = j.value("registered_secret", std::string());
  p.plain_username = j.value("plain_username", std::string());
  p.plain_secret = j.value("plain_secret", std::string());
  p.listed_aae = j.value("listed_aae", std::string());
  p.unlisted_aae = j.value("unlisted_aae", p.unlisted_aae);
  return p;
}

nlohmann::json ProbeConfig::to_json() const {
  return {{"open_pid", open_pid},
          {"registered_pid", registered_pid},
          {"controlled_pid", controlled_pid},
          {"registered_username", registered_username},
          {"registered_secret", registered_secret},
          {"plain_username", plain_username},
          {"plain_secret", plain_secret},
          {"listed_aae", listed_aae},
          {"unlisted_aae", unlisted_aae}};
}

std::string_view check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not_applicable";
  }
  return "fail";
}

std::optional<CheckStatus> check_status_from(std::string_view name) {
  if (name == "pass") return CheckStatus::pass;
  if (name == "fail") return CheckStatus::fail;
  if (name == "not_applicable") return CheckStatus::not_applicable;
  return std::nullopt;
}

MeshDescriptor MeshDescriptor::from_json(const nlohmann::json& j) {
  MeshDescriptor d;
  d.manifest = manifest_from_json(j.at("manifest"));
  d.dmms_endpoint = j.value("dmms_endpoint", std::string());
  d.hub_endpoint = j.value("hub_endpoint", std::string());
  for (const auto& n : j.value("nodes", nlohmann::json::array())) {
    d.nodes.emplace_back(n.at("platform_id").get<std::string>(),
                         n.at("endpoint").get<std::string>());
  }
  if (j.contains("probe")) d.probe = ProbeConfig::from_json(j.at("probe"));
  return d;
}

nlohmann::json MeshDescriptor::to_json() const {
  nlohmann::json nodes_json = nlohmann::json::array();
  for (const auto& [id, endpoint] : nodes) {
    nodes_json.push_back({{"platform_id", id}, {"endpoint", endpoint}});
  }
  return {{"manifest", manifest_to_json(manifest)},
          {"dmms_endpoint", dmms_endpoint},
          {"hub_endpoint", hub_endpoint},
          {"nodes", nodes_json},
          {"probe", probe.to_json()}};
}

MeshDescriptor MeshDescriptor::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MeshError(ErrorCode::bad_fixture, "cannot open " + path);
  }
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw MeshError(ErrorCode::bad_fixture, path + " is not valid JSON");
  }
  return from_json(j);
}

namespace {

/// Accumulates probe evidence for one pillar. While the check passes it
/// keeps the positive notes; the first failure switches the evidence to
/// the failure list.
class CheckBuilder {
 public:
  explicit CheckBuilder(int pillar) { check_.pillar = pillar; }

  void fail(std::string probe, std::string observed, std::string expected) {
    failed_ = true;
    fails_.push_back(
        {std::move(probe), std::move(observed), std::move(expected)});
  }

  void note(std::string probe, std::string observed, std::string expected) {
    notes_.push_back(
        {std::move(probe), std::move(observed), std::move(expected)});
  }

  void not_applicable(std::string probe, std::string observed,
                      std::string expected) {
    na_ = true;
    notes_.push_back(
        {std::move(probe), std::move(observed), std::move(expected)});
  }

  bool failed() const { return failed_; }

  PillarCheck build() {
    check_.status = failed_ ? CheckStatus::fail
                            : (na_ ? CheckStatus::not_applicable
                                   : CheckStatus::pass);
    check_.evidence = failed_ ? fails_ : notes_;
    std::sort(check_.evidence.begin(), check_.evidence.end(),
              [](const Evidence& a, const Evidence& b) {
                return std::tie(a.probe, a.observed, a.expected) <
                       std::tie(b.probe, b.observed, b.expected);
              });
    return check_;
  }

 private:
  PillarCheck check_;
  std::vector<Evidence> fails_;
  std::vector<Evidence> notes_;
  bool failed_ = false;
  bool na_ = false;
};

std::vector<std::string> list_node_pids(NodeGateway& gw) {
  std::vector<std::string> pids;
  std::optional<std::string> cursor;
  do {
    std::string path = "/objects";
    if (cursor) path += "?cursor=" + *cursor;
    auto page = gw.get_json(path);
    for (const auto& p : page.at("pids")) pids.push_back(p.get<std::string>());
    cursor = page.contains("next_cursor")
                 ? std::optional(page.at("next_cursor").get<std::string>())
                 : std::nullopt;
  } while (cursor);
  return pids;
}

/// GET of an absolute URL, returning raw bytes (the P3 content fetch).
std::string fetch_raw(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw MeshError(ErrorCode::node_unreachable, "not a URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos
                         ? url
                         : url.substr(0, path_start);
  std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);
  httplib::Client client(base);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(15, 0);
  auto result = client.Get(path);
  if (!result) {
    throw MeshError(ErrorCode::node_unreachable,
                    url + ": " + httplib::to_string(result.error()));
  }
  if (result->status >= 400) {
    throw MeshError(ErrorCode::not_authorized,
                    url + " returned HTTP " + std::to_string(result->status));
  }
  return result->body;
}

std::string decision_cell(NodeGateway& gw, const std::string& pid,
                          const std::optional<std::string>& token) {
  try {
    gw.get_json("/objects/" + encode_pid_path(pid) + "/access", token);
    return "granted";
  } catch (const MeshError& e) {
    if (e.code() == ErrorCode::not_authorized) return "denied";
    return std::string("error: ") + e.what();
  }
}

PillarCheck probe_pillar1(const std::vector<std::string>& pids) {
  CheckBuilder c(1);
  for (const auto& pid : pids) {
    try {
      parse_pid(pid);
    } catch (const MeshError&) {
      c.fail("pid_grammar", "unparseable PID \"" + pid + "\"",
             "every listed object carries a scheme:namespace/suffix PID");
    }
  }
  c.note("pid_grammar", "all listed PIDs parse",
         "every listed object carries a scheme:namespace/suffix PID");
  return c.build();
}

PillarCheck probe_pillar2(NodeGateway& gw,
                          const std::vector<std::string>& pids) {
  static const char* kPublicFields[] = {
      "title",       "description",          "object_type",
      "hosting_platform_id", "primary_platform_pid", "access_tier"};
  CheckBuilder c(2);
  for (const auto& pid : pids) {
    try {
      auto body =
          gw.get_json("/objects/" + encode_pid_path(pid) + "/metadata");
      const auto& metadata = body.at("metadata");
      for (const char* field : kPublicFields) {
        if (!metadata.contains(field)) {
          c.fail("fair_metadata",
                 pid + " is missing public field " + field,
                 "minimum metadata fields anonymously readable");
        }
      }
      bool rel_data = false, rel_license = false;
      for (const auto& link : body.value("links", nlohmann::json::array())) {
        auto rel = link.value("rel", std::string());
        if (link.value("href", std::string()).empty()) {
          c.fail("fair_links", pid + " has a link without href",
                 "typed links carry rel and href");
        }
        rel_data = rel_data || rel == "data";
        rel_license = rel_license || rel == "license";
      }
      if (!rel_data || !rel_license) {
        c.fail("fair_links", pid + " lacks rel=data or rel=license links",
               "typed links to data and license");
      }
    } catch (const MeshError& e) {
      c.fail("fair_metadata", pid + ": " + e.what(),
             "metadata endpoint resolves every listed PID");
    }
  }
  c.note("fair_metadata", "metadata resolves for every listed PID",
         "metadata endpoint resolves every listed PID");
  c.note("fair_links", "typed links present on every record",
         "typed links to data and license");
  return c.build();
}

PillarCheck probe_pillar3(NodeGateway& gw, const ProbeConfig& probe) {
  CheckBuilder c(3);
  try {
    auto descriptor = gw.get_json(
        "/objects/" + encode_pid_path(probe.open_pid) + "/access");
    auto checksum =
        descriptor.at("checksums").at(0).at("checksum").get<std::string>();
    auto size = descriptor.at("size").get<uint64_t>();
    auto url = descriptor.at("access_methods")
                   .at(0)
                   .at("access_url")
                   .at("url")
                   .get<std::string>();
    auto content = fetch_raw(url);
    if (content.size() != size) {
      c.fail("data_access",
             "content size " + std::to_string(content.size()) +
                 " != descriptor size " + std::to_string(size),
             "descriptor size matches content");
    }
    if (crypto::sha256_hex(content) != checksum) {
      c.fail("data_access", "content digest differs from descriptor checksum",
             "sha-256(content) equals descriptor checksum");
    }
  } catch (const MeshError& e) {
    c.fail("data_access", std::string(e.what()),
           "open object data retrievable anonymously with verifiable digest");
  }
  c.note("data_access", "open object bytes retrieved and digest verified",
         "open object data retrievable anonymously with verifiable digest");
  return c.build();
}

PillarCheck probe_pillar4(NodeGateway& gw, const ProbeConfig& probe) {
  CheckBuilder c(4);
  std::optional<std::string> visa_token, plain_token;
  try {
    visa_token = gw.post_json("/auth/token",
                              {{"username", probe.registered_username},
                               {"secret", probe.registered_secret}})
                     .at("token")
                     .get<std::string>();
  } catch (const MeshError& e) {
    c.fail("auth_issuance", std::string(e.what()),
           "token issued for known registered user");
  }
  try {
    plain_token = gw.post_json("/auth/token",
                               {{"username", probe.plain_username},
                                {"secret", probe.plain_secret}})
                      .at("token")
                      .get<std::string>();
  } catch (const MeshError& e) {
    c.fail("auth_issuance", std::string(e.what()),
           "token issued for known registered user");
  }
  try {
    gw.post_json("/auth/token", {{"username", probe.registered_username},
                                 {"secret", probe.registered_secret +
                                                "-wrong"}});
    c.fail("auth_bad_credentials", "token issued for a wrong secret",
           "BadCredentials");
  } catch (const MeshError& e) {
    if (e.code() != ErrorCode::bad_credentials) {
      c.fail("auth_bad_credentials", std::string(e.what()), "BadCredentials");
    }
  }

  struct TokenState {
    const char* name;
    std::optional<std::string> wire;
  };
  const TokenState states[] = {
      {"none", std::nullopt},
      {"invalid", std::optional<std::string>("bm90LWEtdG9rZW4.deadbeef")},
      {"registered", plain_token},
      {"registered+visa", visa_token}};
  struct TierRow {
    const char* tier;
    const std::string& pid;
    bool expect[4];  // per token state
  };
  const TierRow rows[] = {
      {"open", probe.open_pid, {true, true, true, true}},
      {"registered", probe.registered_pid, {false, false, true, true}},
      {"controlled", probe.controlled_pid, {false, false, false, true}},
  };
  for (const auto& row : rows) {
    for (size_t s = 0; s < 4; ++s) {
      auto observed = decision_cell(gw, row.pid, states[s].wire);
      std::string expected = row.expect[s] ? "granted" : "denied";
      if (observed != expected) {
        c.fail("authz_matrix",
               std::string(row.tier) + " × " + states[s].name + " → " +
                   observed,
               std::string(row.tier) + " × " + states[s].name + " → " +
                   expected);
      }
    }
  }
  c.note("authz_matrix", "12/12 decision cells as expected",
         "3-tier × 4-token-state matrix");
  c.note("auth_issuance", "tokens issued for registered users",
         "token issued for known registered user");
  return c.build();
}

PillarCheck probe_pillar5(NodeGateway& gw, const ProbeConfig& probe) {
  CheckBuilder c(5);
  std::optional<std::string> visa_token;
  try {
    visa_token = gw.post_json("/auth/token",
                              {{"username", probe.registered_username},
                               {"secret", probe.registered_secret}})
                     .at("token")
                     .get<std::string>();
    auto grant = gw.post_json(
        "/objects/" + encode_pid_path(probe.controlled_pid) + "/transfer",
        {{"aae_id", probe.listed_aae}}, visa_token);
    if (grant.value("aae_id", std::string()) != probe.listed_aae) {
      c.fail("aae_transfer", "grant names a different AAE",
             "grant for the requested allow-listed AAE");
    }
  } catch (const MeshError& e) {
    c.fail("aae_transfer", std::string(e.what()),
           "transfer to an allow-listed AAE granted on behalf of the user");
  }
  try {
    gw.post_json(
        "/objects/" + encode_pid_path(probe.controlled_pid) + "/transfer",
        {{"aae_id", probe.unlisted_aae}}, visa_token);
    c.fail("aae_unlisted", "transfer granted to an unlisted AAE",
           "AaeNotAuthorized");
  } catch (const MeshError& e) {
    if (e.code() != ErrorCode::aae_not_authorized) {
      c.fail("aae_unlisted", std::string(e.what()), "AaeNotAuthorized");
    }
  }
  c.note("aae_transfer", "transfer granted to the allow-listed AAE",
         "transfer to an allow-listed AAE granted on behalf of the user");
  c.note("aae_unlisted", "transfer to an unlisted AAE rejected",
         "AaeNotAuthorized");
  return c.build();
}

std::vector<nlohmann::json> list_dmm_records(NodeGateway& dmms) {
  std::vector<nlohmann::json> records;
  std::optional<std::string> cursor;
  do {
    std::string path = "/dmms/records?page_size=50";
    if (cursor) path += "&cursor=" + *cursor;
    auto page = dmms.get_json(path);  // anonymous on purpose (Pillar 10)
    for (const auto& r : page.at("records")) records.push_back(r);
    cursor = page.contains("next_cursor")
                 ? std::optional(page.at("next_cursor").get<std::string>())
                 : std::nullopt;
  } while (cursor);
  return records;
}

std::string record_tier(const nlohmann::json& record) {
  return record.value("metadata", nlohmann::json::object())
      .value("access_tier", std::string());
}

PillarCheck probe_pillar9(const MeshDescriptor& d,
                          const std::vector<nlohmann::json>& records) {
  CheckBuilder c(9);
  if (!d.manifest.usage_stats_required) {
    c.not_applicable("usage_required",
                     "manifest does not require usage statistics",
                     "Pillar 9 is optional for a data mesh");
    return c.build();
  }

  std::map<std::string, std::string> node_endpoints(d.nodes.begin(),
                                                    d.nodes.end());
  auto endpoint_of = [&](const nlohmann::json& record) -> std::string {
    auto it = node_endpoints.find(
        record.value("hosting_platform_id", std::string()));
    return it == node_endpoints.end() ? std::string() : it->second;
  };

  const nlohmann::json* open_record = nullptr;
  for (const auto& r : records) {
    if (record_tier(r) == "open" && !endpoint_of(r).empty()) {
      open_record = &r;
      break;
    }
  }
  if (!open_record) {
    c.fail("usage_probe", "no open-tier record hosted by a known node",
           "an open object to exercise the usage pipeline");
    return c.build();
  }

  try {
    NodeGateway hub("hub", d.hub_endpoint, nullptr);
    auto open_host = open_record->value("hosting_platform_id", std::string());
    NodeGateway open_node(open_host, endpoint_of(*open_record), nullptr);
    auto token = open_node
                     .post_json("/auth/token",
                                {{"username", d.probe.registered_username},
                                 {"secret", d.probe.registered_secret}})
                     .at("token")
                     .get<std::string>();
    auto open_pid = open_record->value("mesh_pid", std::string());
    hub.post_json("/hub/access",
                  {{"mesh_pid", open_pid}, {"aae_id", d.probe.listed_aae}},
                  token);

    // one controlled access so the identity-bearing path is exercised too
    std::string controlled_pid, controlled_host;
    for (const auto& r : records) {
      if (record_tier(r) != "controlled" || endpoint_of(r).empty()) continue;
      try {
        NodeGateway host_node(r.value("hosting_platform_id", std::string()),
                              endpoint_of(r), nullptr);
        auto host_token =
            host_node
                .post_json("/auth/token",
                           {{"username", d.probe.registered_username},
                            {"secret", d.probe.registered_secret}})
                .at("token")
                .get<std::string>();
        hub.post_json("/hub/access",
                      {{"mesh_pid", r.value("mesh_pid", std::string())},
                       {"aae_id", d.probe.listed_aae}},
                      host_token);
        controlled_pid = r.value("mesh_pid", std::string());
        controlled_host = r.value("hosting_platform_id", std::string());
        break;
      } catch (const MeshError&) {
        continue;  // try the next controlled record
      }
    }

    hub.post_json("/hub/usage/run", nlohmann::json::object());

    auto find_entry = [](const nlohmann::json& reports,
                         const std::string& pid) -> nlohmann::json {
      for (const auto& report : reports.at("reports")) {
        for (const auto& entry : report.value("entries",
                                              nlohmann::json::array())) {
          if (entry.value("mesh_pid", std::string()) == pid) return entry;
        }
      }
      return nullptr;
    };

    auto open_entry =
        find_entry(open_node.get_json("/usage/reports"), open_pid);
    if (open_entry.is_null()) {
      c.fail("usage_delivery", "no usage entry for the probed open object",
             "usage report delivered to the hosting node");
    } else if (!open_entry.value("identities", nlohmann::json::array())
                    .empty()) {
      c.fail("usage_granularity", "open-tier entry contains identities",
             "only counts returned for open-tier objects");
    } else {
      c.note("usage_delivery", "usage entry delivered to the hosting node",
             "usage report delivered to the hosting node");
      c.note("usage_granularity", "open-tier entry carries counts only",
             "only counts returned for open-tier objects");
    }

    if (!controlled_pid.empty()) {
      NodeGateway controlled_node(controlled_host,
                                  node_endpoints.at(controlled_host), nullptr);
      auto entry = find_entry(controlled_node.get_json("/usage/reports"),
                              controlled_pid);
      bool named = false;
      if (!entry.is_null()) {
        for (const auto& id :
             entry.value("identities", nlohmann::json::array())) {
          named = named || id.get<std::string>() == d.probe.registered_username;
        }
      }
      if (!named) {
        c.fail("usage_identities",
               "controlled-tier entry does not name the accessor",
               "identities returned for controlled-tier accesses");
      } else {
        c.note("usage_identities", "controlled-tier entry names the accessor",
               "identities returned for controlled-tier accesses");
      }
    }
  } catch (const MeshError& e) {
    c.fail("usage_probe", std::string(e.what()),
           "scripted access produces a delivered usage report");
  }
  return c.build();
}

void finish_report(ConformanceReport& report) {
  report.overall = std::all_of(
      report.checks.begin(), report.checks.end(), [](const PillarCheck& c) {
        return c.status != CheckStatus::fail;
      });
}

}  // namespace

ConformanceReport check_node(const std::string& endpoint,
                             const ProbeConfig& probe) {
  ConformanceReport report;
  report.target = endpoint;
  NodeGateway gw("probe-target", endpoint, nullptr);

  std::vector<std::string> pids;
  try {
    pids = list_node_pids(gw);
  } catch (const MeshError& e) {
    report.unreachable = true;
    for (int pillar = 1; pillar <= 5; ++pillar) {
      CheckBuilder c(pillar);
      c.fail("reach_node", std::string(e.what()), "node endpoint reachable");
      report.checks.push_back(c.build());
    }
    finish_report(report);
    return report;
  }

  report.checks.push_back(probe_pillar1(pids));
  report.checks.push_back(probe_pillar2(gw, pids));
  report.checks.push_back(probe_pillar3(gw, probe));
  report.checks.push_back(probe_pillar4(gw, probe));
  report.checks.push_back(probe_pillar5(gw, probe));
  finish_report(report);
  return report;
}

ConformanceReport check_mesh(const MeshDescriptor& d) {
  ConformanceReport report;
  report.target = "mesh:" + d.manifest.mesh_id + " @ " + d.dmms_endpoint;

  CheckBuilder p6(6);
  auto violations = validate_manifest(d.manifest);
  for (const auto& v : violations) {
    p6.fail("governance_manifest", v.code + " " + v.message,
            "validate_manifest finds no violations");
  }
  p6.note("governance_manifest", "manifest present and valid",
          "validate_manifest finds no violations");
  report.checks.push_back(p6.build());

  NodeGateway dmms("dmms", d.dmms_endpoint, nullptr);
  std::vector<nlohmann::json> records;
  try {
    records = list_dmm_records(dmms);
  } catch (const MeshError& e) {
    report.unreachable = true;
    for (int pillar = 7; pillar <= 10; ++pillar) {
      CheckBuilder c(pillar);
      c.fail("reach_dmms", std::string(e.what()), "DMMS endpoint reachable");
      report.checks.push_back(c.build());
    }
    finish_report(report);
    return report;
  }

  CheckBuilder p7(7);
  for (const auto& r : records) {
    auto pid = r.value("mesh_pid", std::string());
    auto type = object_type_from(r.value("object_type", std::string()));
    if (!type || !d.manifest.supported_types.count(*type)) {
      p7.fail("metadata_minimum", pid + " has an unsupported object type",
              "every record's type is mesh-supported");
      continue;
    }
    auto schema_it = d.manifest.schemas.find(*type);
    if (schema_it == d.manifest.schemas.end()) {
      p7.fail("metadata_minimum",
              pid + " has no schema for its type in the manifest",
              "a minimum schema exists for every record type");
      continue;
    }
    for (const auto& v : validate_against_schema(
             r.value("metadata", nlohmann::json::object()),
             schema_it->second)) {
      p7.fail("metadata_minimum", pid + ": " + v.code + " " + v.message,
              "record metadata satisfies its type's minimum schema");
    }
  }
  p7.note("metadata_minimum", "every record satisfies its type's schema",
          "record metadata satisfies its type's minimum schema");
  report.checks.push_back(p7.build());

  CheckBuilder p8(8);
  for (const auto& r : records) {
    auto pid = r.value("mesh_pid", std::string());
    try {
      auto resolved = dmms.get_json("/dmms/resolve/" + encode_pid_path(pid));
      if (resolved.value("hosting_platform_id", std::string()).empty()) {
        p8.fail("resolution", pid + " resolves without a hosting platform",
                "mesh PID resolves to hosting platform + primary PID");
      }
      auto primary = resolved.value("primary_platform_pid", std::string());
      if (primary.empty()) {
        p8.fail("resolution", pid + " resolves without a primary PID",
                "mesh PID resolves to hosting platform + primary PID");
      } else {
        parse_pid(primary);
      }
    } catch (const MeshError&) {
      p8.fail("resolution", pid + " does not resolve",
              "mesh PID resolves to hosting platform + primary PID");
    }
  }
  p8.note("resolution", "every mesh PID resolves",
          "mesh PID resolves to hosting platform + primary PID");
  report.checks.push_back(p8.build());

  report.checks.push_back(probe_pillar9(d, records));

  CheckBuilder p10(10);
  for (const auto& r : records) {
    if (r.value("license", std::string()).empty()) {
      p10.fail("public_api", r.value("mesh_pid", std::string()) +
                                 " carries no license",
               "every record carries a license");
    }
  }
  p10.note("public_api", "anonymous DMM query succeeded",
           "DMM API public and anonymously queryable");
  p10.note("public_api", "every record carries a license",
           "every record carries a license");
  report.checks.push_back(p10.build());

  finish_report(report);
  return report;
}

nlohmann::json report_to_json(const ConformanceReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : c.evidence) {
      evidence.push_back({{"probe", e.probe},
                          {"observed", e.observed},
                          {"expected", e.expected}});
    }
    checks.push_back({{"pillar", c.pillar},
                      {"status", std::string(check_status_name(c.status))},
                      {"evidence", evidence}});
  }
  return {{"report_version", "1"},
          {"target", report.target},
          {"overall", report.overall},
          {"unreachable", report.unreachable},
          {"checks", checks}};
}

ConformanceReport report_from_json(const nlohmann::json& j) {
  ConformanceReport report;
  report.target = j.value("target", std::string());
  report.overall = j.value("overall", false);
  report.unreachable = j.value("unreachable", false);
  for (const auto& c : j.value("checks", nlohmann::json::array())) {
    PillarCheck check;
    check.pillar = c.value("pillar", 0);
    check.status = check_status_from(c.value("status", std::string()))
                       .value_or(CheckStatus::fail);
    for (const auto& e : c.value("evidence", nlohmann::json::array())) {
      check.evidence.push_back({e.value("probe", std::string()),
                                e.value("observed", std::string()),
                                e.value("expected", std::string())});
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

std::string render_report(const ConformanceReport& report,
                          const std::string& format) {
  if (format == "json") {
    return report_to_json(report).dump(2) + "\n";
  }
  std::ostringstream out;
  out << "conformance report: " << report.target << "\n";
  size_t applicable = 0, passed = 0;
  for (int pillar = 1; pillar <= 10; ++pillar) {
    const PillarCheck* check = nullptr;
    for (const auto& c : report.checks) {
      if (c.pillar == pillar) check = &c;
    }
    out << "  pillar " << (pillar < 10 ? " " : "") << pillar << "  ";
    if (!check) {
      out << "-\n";
      continue;
    }
    out << check_status_name(check->status) << "\n";
    if (check->status == CheckStatus::fail) {
      for (const auto& e : check->evidence) {
        out << "    " << e.probe << ": observed " << e.observed
            << "; expected " << e.expected << "\n";
      }
    }
    if (check->status != CheckStatus::not_applicable) ++applicable;
    if (check->status == CheckStatus::pass) ++passed;
  }
  out << (report.overall ? "PASS " : "FAIL ") << passed << "/" << applicable
      << " applicable checks passed\n";
  return out.str();
}

int exit_code_for(const ConformanceReport& report) {
  if (report.unreachable) return 2;
  return report.overall ? 0 : 1;
}

}  // namespace meshkit
