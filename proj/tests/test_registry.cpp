// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "meshkit/errors.hpp"
#include "meshkit/manifest.hpp"
#include "meshkit/registry.hpp"

using namespace meshkit;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = MESHKIT_FIXTURE_DIR;

MeshManifest demo_manifest() {
  return load_manifest(kFixtures + "/manifest.json");
}

PlatformDescriptor eligible_platform(const std::string& id) {
  return {id,
          "http://127.0.0.1:9000",
          {"audit-logging", "encryption-at-rest"},
          {AccessTier::open, AccessTier::registered, AccessTier::controlled}};
}

RegistrationRequest dataset_request(const std::string& platform,
                                    const std::string& local_pid,
                                    const std::string& title) {
  RegistrationRequest r;
  r.object_type = DataObjectType::dataset;
  r.hosting_platform_id = platform;
  r.primary_platform_pid = parse_pid(local_pid);
  r.metadata = {{"title", title},
                {"description", "registered by the test harness"},
                {"object_type", "dataset"},
                {"hosting_platform_id", platform},
                {"primary_platform_pid", local_pid},
                {"access_tier", "open"}};
  return r;
}

std::string temp_journal(const std::string& tag) {
  auto dir = fs::temp_directory_path() / "meshkit-tests";
  fs::create_directories(dir);
  auto path = dir / (tag + "-" + std::to_string(::getpid()) + ".jsonl");
  fs::remove(path);
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
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

TEST_CASE("registration mints one mesh pid and journals one line") {
  auto journal = temp_journal("mint");
  Registry reg(demo_manifest(), journal);
  reg.enroll_platform(eligible_platform("nodea"));

  auto out = reg.register_object(
      dataset_request("nodea", "guid:nodea/obj-1", "First dataset"));
  CHECK(out.created);
  CHECK(out.changed);
  CHECK(out.record.mesh_pid.scheme == PidScheme::mesh);
  CHECK(out.record.mesh_pid.ns == "demo-mesh");
  CHECK(out.record.license == "cc-by-4.0");  // manifest default applies
  CHECK(out.record.provenance.size() == out.record.metadata.size());
  for (const auto& p : out.record.provenance) {
    CHECK(p.source == ProvenanceSource::platform_api);
    CHECK(p.applied);
  }

  auto text = slurp(journal);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);

  SUBCASE("identical re-registration appends nothing") {
    auto again = reg.register_object(
        dataset_request("nodea", "guid:nodea/obj-1", "First dataset"));
    CHECK(!again.created);
    CHECK(!again.changed);
    CHECK(again.record.mesh_pid == out.record.mesh_pid);
    CHECK(slurp(journal) == text);  // byte-identical journal
  }
  SUBCASE("changed metadata updates in place under the same mesh pid") {
    auto updated = reg.register_object(
        dataset_request("nodea", "guid:nodea/obj-1", "Renamed dataset"));
    CHECK(!updated.created);
    CHECK(updated.changed);
    CHECK(updated.record.mesh_pid == out.record.mesh_pid);
    CHECK(updated.record.metadata.at("title") == "Renamed dataset");
    CHECK(reg.record_count() == 1);
  }
  fs::remove(journal);
}

TEST_CASE("registration rejects in a fixed precedence order") {
  Registry reg(demo_manifest());

  auto unsupported = dataset_request("nodea", "guid:nodea/x", "t");
  unsupported.object_type = DataObjectType::sequence_file;
  CHECK(code_of([&] { reg.register_object(unsupported); }) ==
        ErrorCode::unsupported_object_type);

  // platform not enrolled yet
  CHECK(code_of([&] {
          reg.register_object(dataset_request("nodea", "guid:nodea/x", "t"));
        }) == ErrorCode::unknown_platform);

  // enrolled but missing an attestation
  PlatformDescriptor weak = eligible_platform("nodea");
  weak.attested_requirements = {"audit-logging"};
  reg.enroll_platform(weak);
  CHECK(code_of([&] {
          reg.register_object(dataset_request("nodea", "guid:nodea/x", "t"));
        }) == ErrorCode::ineligible_platform);

  // eligible but the metadata is short a field
  reg.enroll_platform(eligible_platform("nodea"));
  auto bad = dataset_request("nodea", "guid:nodea/x", "t");
  bad.metadata.erase("description");
  CHECK(code_of([&] { reg.register_object(bad); }) ==
        ErrorCode::schema_violation);
  CHECK(reg.record_count() == 0);
}

TEST_CASE("journal replay reconstructs records, resolver, and minter state") {
  auto journal = temp_journal("replay");
  std::string mesh_pid_text;
  {
    Registry reg(demo_manifest(), journal);
    reg.enroll_platform(eligible_platform("nodea"));
    auto out = reg.register_object(
        dataset_request("nodea", "guid:nodea/obj-1", "Replayed dataset"));
    mesh_pid_text = out.record.mesh_pid.render();
    reg.supplement_metadata(out.record.mesh_pid, {{"keywords", "replay"}},
                            ProvenanceSource::contributor);
  }

  Registry reborn(demo_manifest(), journal);
  CHECK(reborn.record_count() == 1);
  auto rec = reborn.get_record(parse_pid(mesh_pid_text), std::nullopt);
  CHECK(rec.metadata.at("keywords") == "replay");
  CHECK(rec.provenance.back().source == ProvenanceSource::contributor);

  // resolver rebuilt for both the mesh pid and the primary pid
  CHECK(reborn.resolver().contains(parse_pid(mesh_pid_text)));
  CHECK(reborn.resolver().contains(parse_pid("guid:nodea/obj-1")));

  // the minter refuses to re-issue the replayed suffix, and registering
  // the same source again reuses the existing record
  reborn.enroll_platform(eligible_platform("nodea"));
  auto again = reborn.register_object(
      dataset_request("nodea", "guid:nodea/obj-1", "Replayed dataset"));
  CHECK(!again.created);
  CHECK(again.record.mesh_pid.render() == mesh_pid_text);
  fs::remove(journal);
}

TEST_CASE("supplement precedence: hub < platform < contributor") {
  Registry reg(demo_manifest());
  reg.enroll_platform(eligible_platform("nodea"));
  auto pid = reg.register_object(
                    dataset_request("nodea", "guid:nodea/obj-1", "Original"))
                 .record.mesh_pid;

  SUBCASE("hub may fill gaps but not overwrite platform fields") {
    auto rec = reg.supplement_metadata(pid, {{"keywords", "demo"}},
                                       ProvenanceSource::hub_supplement);
    CHECK(rec.metadata.at("keywords") == "demo");
    CHECK(rec.provenance.back().applied);

    rec = reg.supplement_metadata(pid, {{"title", "Hub title"}},
                                  ProvenanceSource::hub_supplement);
    CHECK(rec.metadata.at("title") == "Original");  // value unchanged
    CHECK(!rec.provenance.back().applied);          // attempt recorded
    CHECK(rec.provenance.back().field == "title");
  }
  SUBCASE("contributor overrides platform, platform cannot override back") {
    auto rec = reg.supplement_metadata(pid, {{"title", "Curated title"}},
                                       ProvenanceSource::contributor);
    CHECK(rec.metadata.at("title") == "Curated title");
    CHECK(rec.provenance.back().applied);

    rec = reg.supplement_metadata(pid, {{"title", "Platform title"}},
                                  ProvenanceSource::platform_api);
    CHECK(rec.metadata.at("title") == "Curated title");
    CHECK(!rec.provenance.back().applied);
  }
  SUBCASE("same-rank overwrite is allowed") {
    auto rec = reg.supplement_metadata(pid, {{"title", "Second platform pass"}},
                                       ProvenanceSource::platform_api);
    CHECK(rec.metadata.at("title") == "Second platform pass");
    CHECK(rec.provenance.back().applied);
  }
  SUBCASE("writing the same value is a provenance no-op") {
    auto before = reg.get_record(pid, std::nullopt).provenance.size();
    auto rec = reg.supplement_metadata(pid, {{"title", "Original"}},
                                       ProvenanceSource::hub_supplement);
    CHECK(rec.provenance.size() == before);
  }
  SUBCASE("supplemented dois refresh the typed doi index") {
    auto rec = reg.supplement_metadata(
        pid,
        {{"publication_dois",
          nlohmann::json::array({"doi:10.1000/demo.900"})}},
        ProvenanceSource::contributor);
    REQUIRE(rec.publication_dois.size() == 1);
    CHECK(rec.publication_dois[0].render() == "doi:10.1000/demo.900");
  }
  SUBCASE("unknown record") {
    CHECK(code_of([&] {
            reg.supplement_metadata(parse_pid("mesh:demo-mesh/nope"), {},
                                    ProvenanceSource::contributor);
          }) == ErrorCode::unknown_pid);
  }
}

TEST_CASE("re-harvest restores platform values; contributor-only fields survive") {
  Registry reg(demo_manifest());
  reg.enroll_platform(eligible_platform("nodea"));
  auto req = dataset_request("nodea", "guid:nodea/obj-1", "Platform title");
  auto pid = reg.register_object(req).record.mesh_pid;

  reg.supplement_metadata(pid, {{"title", "Curated title"}, {"keywords", "k"}},
                          ProvenanceSource::contributor);
  // the platform re-submits its own copy; its fields win on that channel
  auto rec = reg.register_object(req).record;
  CHECK(rec.metadata.at("title") == "Platform title");
  CHECK(rec.metadata.at("keywords") == "k");
}

TEST_CASE("query pagination reassembles exactly for page sizes 1 through 7") {
  Registry reg(demo_manifest());
  reg.enroll_platform(eligible_platform("nodea"));
  reg.enroll_platform(eligible_platform("nodeb"));

  const char* types[] = {"dataset", "imaging_object", "participant_omics"};
  const DataObjectType enums[] = {DataObjectType::dataset,
                                  DataObjectType::imaging_object,
                                  DataObjectType::participant_omics};
  for (int i = 0; i < 25; ++i) {
    std::string platform = i % 2 ? "nodea" : "nodeb";
    std::string local = "guid:" + platform + "/obj-" + std::to_string(i);
    RegistrationRequest r;
    r.object_type = enums[i % 3];
    r.hosting_platform_id = platform;
    r.primary_platform_pid = parse_pid(local);
    r.metadata = {{"title", "Record number " + std::to_string(i)},
                  {"description", i % 5 == 0 ? "marker lantern" : "plain"},
                  {"object_type", types[i % 3]},
                  {"hosting_platform_id", platform},
                  {"primary_platform_pid", local},
                  {"access_tier", "open"}};
    reg.register_object(r);
  }
  REQUIRE(reg.record_count() == 25);

  auto whole = reg.query_records({}, std::nullopt, 1000, std::nullopt);
  REQUIRE(whole.records.size() == 25);
  CHECK(!whole.next_cursor);
  std::vector<std::string> expected;
  for (const auto& r : whole.records) expected.push_back(r.mesh_pid.render());

  for (size_t page_size = 1; page_size <= 7; ++page_size) {
    CAPTURE(page_size);
    std::vector<std::string> walked;
    std::optional<std::string> cursor;
    size_t pages = 0;
    do {
      auto page = reg.query_records({}, cursor, page_size, std::nullopt);
      for (const auto& r : page.records) walked.push_back(r.mesh_pid.render());
      cursor = page.next_cursor;
      REQUIRE(++pages <= 25);  // progress guard
    } while (cursor);
    CHECK(walked == expected);
  }

  SUBCASE("filters agree with a brute-force predicate") {
    QueryFilter f;
    f.object_type = DataObjectType::imaging_object;
    f.hosting_platform_id = "nodea";
    auto got = reg.query_records(f, std::nullopt, 1000, std::nullopt);
    size_t oracle = 0;
    for (const auto& r : whole.records) {
      if (r.object_type == DataObjectType::imaging_object &&
          r.hosting_platform_id == "nodea") {
        ++oracle;
      }
    }
    CHECK(got.records.size() == oracle);
    CHECK(oracle > 0);

    QueryFilter text;
    text.text = "LANTERN";  // case-insensitive
    auto hits = reg.query_records(text, std::nullopt, 1000, std::nullopt);
    CHECK(hits.records.size() == 5);
  }
  SUBCASE("malformed cursors are refused") {
    for (const char* bad : {"abc", "12x", "-1", "1 2"}) {
      CAPTURE(bad);
      CHECK(code_of([&] {
              reg.query_records({}, std::string(bad), 5, std::nullopt);
            }) == ErrorCode::malformed_cursor);
    }
  }
  SUBCASE("page size zero still makes progress") {
    auto page = reg.query_records({}, std::nullopt, 0, std::nullopt);
    CHECK(page.records.size() == 1);
    REQUIRE(page.next_cursor);
    CHECK(*page.next_cursor == "1");
  }
  SUBCASE("cursor beyond the end yields an empty final page") {
    auto page = reg.query_records({}, std::string("400"), 5, std::nullopt);
    CHECK(page.records.empty());
    CHECK(!page.next_cursor);
  }
}

TEST_CASE("mixed-visibility meshes withhold private records from anonymous callers") {
  auto manifest = demo_manifest();
  manifest.dmm_visibility = DmmVisibility::mixed;
  Registry reg(manifest);
  reg.enroll_platform(eligible_platform("nodea"));

  auto pub = dataset_request("nodea", "guid:nodea/pub", "Public record");
  auto priv = dataset_request("nodea", "guid:nodea/priv", "Private record");
  priv.metadata["visibility"] = "private";
  auto pub_pid = reg.register_object(pub).record.mesh_pid;
  auto priv_pid = reg.register_object(priv).record.mesh_pid;

  CHECK(reg.query_records({}, std::nullopt, 10, std::nullopt).records.size() == 1);
  CHECK(reg.query_records({}, std::nullopt, 10, std::string("u1")).records.size() == 2);
  CHECK_NOTHROW(reg.get_record(pub_pid, std::nullopt));
  CHECK(code_of([&] { reg.get_record(priv_pid, std::nullopt); }) ==
        ErrorCode::not_authorized);
  CHECK_NOTHROW(reg.get_record(priv_pid, std::string("u1")));
}

TEST_CASE("audit flags hand-mutated journals with stable codes") {
  auto journal = temp_journal("audit");
  {
    Registry reg(demo_manifest(), journal);
    reg.enroll_platform(eligible_platform("nodea"));
    reg.register_object(dataset_request("nodea", "guid:nodea/a", "Alpha"));
    reg.register_object(dataset_request("nodea", "guid:nodea/b", "Beta"));
  }

  // Break each invariant in a copied journal, then reload and audit.
  auto mutate = [&](const std::function<void(nlohmann::json&)>& fn) {
    std::ifstream in(journal);
    std::vector<nlohmann::json> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
    fn(lines.at(0).at("record"));
    auto mutated = temp_journal("audit-mutated");
    std::ofstream out(mutated, std::ios::trunc);
    for (const auto& l : lines) out << l.dump() << "\n";
    return mutated;
  };

  SUBCASE("missing license") {
    Registry reg(demo_manifest(),
                 mutate([](nlohmann::json& r) { r.erase("license"); }));
    auto v = reg.audit();
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "MISSING_LICENSE");
  }
  SUBCASE("blank primary pid") {
    Registry reg(demo_manifest(), mutate([](nlohmann::json& r) {
                   r["primary_platform_pid"] = "";
                 }));
    auto v = reg.audit();
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) {
      return x.code == "MISSING_PRIMARY_PID";
    }));
  }
  SUBCASE("metadata loses a required field") {
    Registry reg(demo_manifest(), mutate([](nlohmann::json& r) {
                   r["metadata"].erase("description");
                 }));
    auto v = reg.audit();
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "MISSING_FIELD");
  }
  SUBCASE("clean journal audits clean") {
    Registry reg(demo_manifest(), journal);
    CHECK(reg.audit().empty());
  }
  fs::remove(journal);
}
