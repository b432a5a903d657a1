// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <string>

#include "meshkit/crypto.hpp"
#include "meshkit/errors.hpp"
#include "meshkit/node.hpp"

using namespace meshkit;

namespace {

const std::string kFixtures = MESHKIT_FIXTURE_DIR;

NodeConfig nodea_config() {
  return NodeConfig::load(kFixtures + "/nodea.json");
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const MeshError& e) {
    return e.code();
  }
  return ErrorCode::internal;  // sentinel: no throw
}

}  // namespace

TEST_CASE("fixture loading fills defaults and computes digests") {
  auto c = nodea_config();
  CHECK(c.platform_id == "nodea");
  CHECK(c.trusted_issuers.count("nodea"));  // self-trust is implicit
  CHECK(c.trusted_issuers.count("nodeb"));
  REQUIRE(c.objects.size() == 3);
  for (const auto& obj : c.objects) {
    CHECK(obj.checksum == crypto::sha256_hex(obj.content));
    CHECK(obj.size == obj.content.size());
  }
  auto d = c.descriptor("http://127.0.0.1:7001");
  CHECK(d.platform_id == "nodea");
  CHECK(d.attested_requirements.count("encryption-at-rest"));
}

TEST_CASE("authentication issues verifiable passports") {
  PlatformNode node(nodea_config());
  auto wire = node.authenticate("u1", "u1-secret");
  auto token = node.codec().verify(wire, unix_now());
  REQUIRE(token);
  CHECK(token->subject == "u1");
  CHECK(token->issuer == "nodea");
  CHECK(token->registered);
  REQUIRE(token->visas.size() == 1);
  CHECK(token->visas[0].scope_pid.render() == "guid:nodea/ALL");

  CHECK(code_of([&] { node.authenticate("u1", "wrong"); }) ==
        ErrorCode::bad_credentials);
  CHECK(code_of([&] { node.authenticate("nobody", "x"); }) ==
        ErrorCode::bad_credentials);
}

TEST_CASE("token verification rejects tampering, expiry, unknown issuers") {
  PlatformNode node(nodea_config());
  auto now = unix_now();
  auto wire = node.authenticate("u1", "u1-secret");
  REQUIRE(node.codec().verify(wire, now));

  SUBCASE("bit-flip in the tag") {
    auto bad = wire;
    bad.back() = bad.back() == 'a' ? 'b' : 'a';
    CHECK(!node.codec().verify(bad, now));
  }
  SUBCASE("bit-flip in the payload") {
    auto bad = wire;
    bad[2] = bad[2] == 'A' ? 'B' : 'A';
    CHECK(!node.codec().verify(bad, now));
  }
  SUBCASE("whole-cloth garbage") {
    CHECK(!node.codec().verify("not-a-token", now));
    CHECK(!node.codec().verify("", now));
    CHECK(!node.codec().verify(".", now));
  }
  SUBCASE("expired token") {
    CHECK(!node.codec().verify(wire, now + 3600 + 5));
  }
  SUBCASE("issuer outside the trust table") {
    NodeConfig stranger = nodea_config();
    stranger.platform_id = "nodez";
    stranger.issuer_secret = "zzz";
    stranger.trusted_issuers = {{"nodez", "zzz"}};
    PlatformNode z(stranger);
    auto foreign = z.authenticate("u1", "u1-secret");
    CHECK(!node.codec().verify(foreign, now));
  }
  SUBCASE("visa honors platform scope boundaries") {
    auto token = *node.codec().verify(wire, now);
    auto controlled = parse_pid("guid:nodea/ct-ctl-1");
    CHECK(token.visa_for(controlled, "nodea", now));
    // the nodea-wide visa says nothing about nodeb's objects
    CHECK(!token.visa_for(parse_pid("guid:nodeb/om-ctl-2"), "nodeb", now));
    // an expired visa confers nothing
    CHECK(!token.visa_for(controlled, "nodea", now + 7200 + 5));
  }
}

TEST_CASE("the full 3-tier by 4-state decision matrix") {
  PlatformNode node(nodea_config());
  auto visa_token = node.authenticate("u1", "u1-secret");
  auto registered_token = node.authenticate("u2", "u2-secret");

  struct Cell {
    const char* pid;
    std::optional<std::string> wire;
    bool expect;
  };
  // Oracle: open admits everyone; registered needs a valid registered
  // passport; controlled additionally needs a covering visa.
  const Cell cells[] = {
      {"guid:nodea/ds-open-1", std::nullopt, true},
      {"guid:nodea/ds-open-1", std::string("garbage.token"), true},
      {"guid:nodea/ds-open-1", registered_token, true},
      {"guid:nodea/ds-open-1", visa_token, true},
      {"guid:nodea/st-reg-1", std::nullopt, false},
      {"guid:nodea/st-reg-1", std::string("garbage.token"), false},
      {"guid:nodea/st-reg-1", registered_token, true},
      {"guid:nodea/st-reg-1", visa_token, true},
      {"guid:nodea/ct-ctl-1", std::nullopt, false},
      {"guid:nodea/ct-ctl-1", std::string("garbage.token"), false},
      {"guid:nodea/ct-ctl-1", registered_token, false},
      {"guid:nodea/ct-ctl-1", visa_token, true},
  };
  for (const auto& cell : cells) {
    CAPTURE(cell.pid);
    auto grant = node.authorize(cell.wire, cell.pid);
    CHECK(grant.granted == cell.expect);
    CHECK(grant.constraints.has_value() == cell.expect);
  }

  SUBCASE("an unregistered account is as good as no account") {
    auto plain = node.authenticate("u3", "u3-secret");
    CHECK(node.authorize(plain, "guid:nodea/ds-open-1").granted);
    CHECK(!node.authorize(plain, "guid:nodea/st-reg-1").granted);
    CHECK(!node.authorize(plain, "guid:nodea/ct-ctl-1").granted);
  }
  SUBCASE("unknown object") {
    CHECK(code_of([&] { node.authorize(std::nullopt, "guid:nodea/ghost"); }) ==
          ErrorCode::unknown_pid);
  }
}

TEST_CASE("metadata is public for every tier and carries typed links") {
  PlatformNode node(nodea_config());
  node.set_base_url("http://127.0.0.1:7001");
  for (const char* pid :
       {"guid:nodea/ds-open-1", "guid:nodea/st-reg-1", "guid:nodea/ct-ctl-1"}) {
    auto [metadata, links] = node.get_metadata(pid);
    CHECK(metadata.at("primary_platform_pid") == pid);
    CHECK(metadata.at("hosting_platform_id") == "nodea");
    CHECK(metadata.contains("title"));
    CHECK(metadata.contains("description"));
    CHECK(metadata.contains("object_type"));
    CHECK(metadata.contains("access_tier"));
    REQUIRE(links.size() == 2);
    CHECK(links[0].rel == "data");
    CHECK(links[0].href.find("http://127.0.0.1:7001/objects/") == 0);
    CHECK(links[1].rel == "license");
    CHECK(!links[1].href.empty());
  }
  // the controlled trial's metadata is readable without any token
  auto [md, _] = node.get_metadata("guid:nodea/ct-ctl-1");
  CHECK(md.at("access_tier") == "controlled");
}

TEST_CASE("data descriptors agree with an independently computed digest") {
  auto config = nodea_config();
  PlatformNode node(config);
  node.set_base_url("http://127.0.0.1:7001");

  auto d = node.get_data(std::nullopt, "guid:nodea/ds-open-1");
  const auto& obj = config.objects[0];
  CHECK(d.id == "guid:nodea/ds-open-1");
  CHECK(d.checksum == crypto::sha256_hex(obj.content));
  CHECK(d.size == obj.content.size());
  CHECK(d.access_url ==
        "http://127.0.0.1:7001/objects/guid:nodea/ds-open-1/data");
  CHECK(node.read_content(std::nullopt, "guid:nodea/ds-open-1") == obj.content);

  CHECK(code_of([&] { node.get_data(std::nullopt, "guid:nodea/ct-ctl-1"); }) ==
        ErrorCode::not_authorized);
  CHECK(code_of([&] {
          node.read_content(std::nullopt, "guid:nodea/st-reg-1");
        }) == ErrorCode::not_authorized);
}

TEST_CASE("AAE transfers stay within the node's own allow-list") {
  PlatformNode node(nodea_config());
  node.set_base_url("http://127.0.0.1:7001");
  auto visa_token = node.authenticate("u1", "u1-secret");

  auto grant = node.transfer_to_aae("guid:nodea/ct-ctl-1", "aae-1", visa_token);
  CHECK(grant.pid == "guid:nodea/ct-ctl-1");
  CHECK(grant.aae_id == "aae-1");
  CHECK(!grant.transfer_url.empty());
  CHECK(!grant.constraints.downloadable_out_of_aae);
  CHECK(!grant.constraints.redistributable);

  // a perfectly valid visa does not make an unlisted AAE acceptable
  CHECK(code_of([&] {
          node.transfer_to_aae("guid:nodea/ct-ctl-1", "aae-rogue", visa_token);
        }) == ErrorCode::aae_not_authorized);
  // and a listed AAE does not excuse a missing visa
  auto registered_token = node.authenticate("u2", "u2-secret");
  CHECK(code_of([&] {
          node.transfer_to_aae("guid:nodea/ct-ctl-1", "aae-1",
                               registered_token);
        }) == ErrorCode::not_authorized);

  auto entries = node.audit_entries();
  CHECK(std::any_of(entries.begin(), entries.end(), [](const nlohmann::json& e) {
    return e.value("op", "") == "transfer" && e.value("aae_id", "") == "aae-1";
  }));
}

TEST_CASE("fault knobs exist for the conformance mutants") {
  SUBCASE("authz_always_grant") {
    auto c = nodea_config();
    c.faults.authz_always_grant = true;
    PlatformNode node(c);
    CHECK(node.authorize(std::nullopt, "guid:nodea/ct-ctl-1").granted);
  }
  SUBCASE("transfer_any_aae") {
    auto c = nodea_config();
    c.faults.transfer_any_aae = true;
    PlatformNode node(c);
    auto visa_token = node.authenticate("u1", "u1-secret");
    CHECK_NOTHROW(
        node.transfer_to_aae("guid:nodea/ct-ctl-1", "aae-rogue", visa_token));
  }
}

TEST_CASE("object listing pages reassemble exactly") {
  PlatformNode node(nodea_config());
  auto whole = node.list_objects(std::nullopt, 100);
  REQUIRE(whole.pids.size() == 3);
  CHECK(!whole.next_cursor);

  for (size_t page_size = 1; page_size <= 3; ++page_size) {
    std::vector<std::string> walked;
    std::optional<std::string> cursor;
    do {
      auto page = node.list_objects(cursor, page_size);
      walked.insert(walked.end(), page.pids.begin(), page.pids.end());
      cursor = page.next_cursor;
    } while (cursor);
    CHECK(walked == whole.pids);
  }
  CHECK(code_of([&] { node.list_objects(std::string("bogus"), 2); }) ==
        ErrorCode::malformed_cursor);
}

TEST_CASE("federated aggregates equal a brute-force oracle per token") {
  auto config = nodea_config();
  PlatformNode node(config);
  auto visa_token = node.authenticate("u1", "u1-secret");
  auto registered_token = node.authenticate("u2", "u2-secret");

  auto oracle = [&](const std::optional<std::string>& wire,
                    std::optional<DataObjectType> type) {
    uint64_t count = 0, sum = 0;
    std::vector<std::string> sums;
    for (const auto& obj : config.objects) {
      if (type && obj.object_type != *type) continue;
      if (!node.authorize(wire, obj.pid).granted) continue;
      ++count;
      sum += obj.size;
      sums.push_back(crypto::sha256_hex(obj.content));
    }
    std::sort(sums.begin(), sums.end());
    return std::tuple{count, sum, sums};
  };

  for (const auto& wire :
       std::vector<std::optional<std::string>>{std::nullopt, registered_token,
                                               visa_token}) {
    auto [count, sum, sums] = oracle(wire, std::nullopt);
    auto counted = node.execute_computation({{"aggregate", "count"}}, wire);
    CHECK(counted.at("status") == "ok");
    CHECK(counted.at("value").get<uint64_t>() == count);
    CHECK(counted.at("requires_review") == false);
    CHECK(node.execute_computation({{"aggregate", "sum_size"}}, wire)
              .at("value")
              .get<uint64_t>() == sum);
    CHECK(node.execute_computation({{"aggregate", "checksum_list"}}, wire)
              .at("value")
              .get<std::vector<std::string>>() == sums);
  }
  // the anonymous caller sees exactly the open object
  CHECK(node.execute_computation({{"aggregate", "count"}}, std::nullopt)
            .at("value") == 1);
  // the visa holder sees everything on this node
  CHECK(node.execute_computation({{"aggregate", "count"}}, visa_token)
            .at("value") == 3);

  auto filtered = node.execute_computation(
      {{"aggregate", "count"}, {"filter", {{"object_type", "dataset"}}}},
      visa_token);
  CHECK(filtered.at("value") == 1);

  SUBCASE("disabled platforms refuse outright") {
    auto off = nodea_config();
    off.federated_enabled = false;
    PlatformNode dark(off);
    CHECK(code_of([&] {
            dark.execute_computation({{"aggregate", "count"}}, std::nullopt);
          }) == ErrorCode::federated_disabled);
  }
  SUBCASE("unknown aggregates are rejected") {
    CHECK_THROWS_AS(
        node.execute_computation({{"aggregate", "median"}}, visa_token),
        MeshError);
  }
}

TEST_CASE("usage report delivery is idempotent per period") {
  PlatformNode node(nodea_config());
  nlohmann::json report = {
      {"platform_id", "nodea"},
      {"period", {{"start", 100}, {"end", 200}}},
      {"entries", nlohmann::json::array(
                      {{{"mesh_pid", "mesh:demo-mesh/x"}, {"count", 2}}})}};
  node.receive_usage_report(report);
  node.receive_usage_report(report);
  CHECK(node.received_usage_reports().size() == 1);

  report["entries"][0]["count"] = 5;
  node.receive_usage_report(report);  // same period: replaced, not appended
  auto stored = node.received_usage_reports();
  REQUIRE(stored.size() == 1);
  CHECK(stored[0].at("entries")[0].at("count") == 5);

  report["period"]["end"] = 300;
  node.receive_usage_report(report);
  CHECK(node.received_usage_reports().size() == 2);
}
