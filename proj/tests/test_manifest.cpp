// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <string>

#include "meshkit/errors.hpp"
#include "meshkit/manifest.hpp"
#include "meshkit/registry.hpp"

using namespace meshkit;

namespace {

const std::string kFixtures = MESHKIT_FIXTURE_DIR;

bool has_code(const std::vector<Violation>& v, const std::string& code) {
  return std::any_of(v.begin(), v.end(),
                     [&](const Violation& x) { return x.code == code; });
}

nlohmann::json valid_study_metadata() {
  return {{"title", "Longitudinal hypertension study"},
          {"description", "Ten-year follow-up."},
          {"object_type", "study"},
          {"hosting_platform_id", "nodea"},
          {"primary_platform_pid", "guid:nodea/st-reg-1"},
          {"access_tier", "registered"},
          {"study_id", "STU-0001"},
          {"publication_dois",
           nlohmann::json::array({"doi:10.1000/demo.2021.001"})}};
}

}  // namespace

TEST_CASE("the shipped demo manifest loads and validates clean") {
  auto m = load_manifest(kFixtures + "/manifest.json");
  CHECK(m.mesh_id == "demo-mesh");
  CHECK(m.supported_types.size() == 5);
  CHECK(m.usage_stats_required);
  CHECK(m.linkage_mode == LinkageMode::guid);
  CHECK(m.default_license == "cc-by-4.0");
  CHECK(validate_manifest(m).empty());

  // json round trip preserves the manifest
  auto again = manifest_from_json(manifest_to_json(m));
  CHECK(manifest_to_json(again) == manifest_to_json(m));
}

TEST_CASE("manifest validation flags structural faults with stable codes") {
  auto m = load_manifest(kFixtures + "/manifest.json");

  SUBCASE("supported type without a schema") {
    m.supported_types.insert(DataObjectType::sequence_file);
    CHECK(has_code(validate_manifest(m), "MISSING_SCHEMA"));
  }
  SUBCASE("mesh id outside the pid namespace grammar") {
    m.mesh_id = "Demo Mesh!";
    CHECK(has_code(validate_manifest(m), "INVALID_NAMESPACE"));
  }
  SUBCASE("schema keyed under the wrong type") {
    auto dataset_schema = m.schemas.at(DataObjectType::dataset);
    m.schemas[DataObjectType::study] = dataset_schema;  // object_type=dataset
    CHECK(!validate_manifest(m).empty());
  }
}

TEST_CASE("minimum schema lookup honors supported_types") {
  auto m = load_manifest(kFixtures + "/manifest.json");
  const auto& s = minimum_schema_for(m, DataObjectType::study);
  CHECK(s.object_type == DataObjectType::study);
  try {
    minimum_schema_for(m, DataObjectType::sequence_file);
    FAIL("unsupported type must throw");
  } catch (const MeshError& e) {
    CHECK(e.code() == ErrorCode::unsupported_object_type);
  }
}

TEST_CASE("default schemas require the universal six plus study extras") {
  auto ds = default_schema_for(DataObjectType::dataset);
  CHECK(ds.required_fields.size() == 6);
  for (const char* name :
       {"title", "description", "object_type", "hosting_platform_id",
        "primary_platform_pid", "access_tier"}) {
    CHECK(std::any_of(ds.required_fields.begin(), ds.required_fields.end(),
                      [&](const RequiredField& f) { return f.name == name; }));
  }
  for (auto t : {DataObjectType::study, DataObjectType::clinical_trial}) {
    auto s = default_schema_for(t);
    CHECK(s.required_fields.size() == 8);
    CHECK(std::any_of(s.required_fields.begin(), s.required_fields.end(),
                      [](const RequiredField& f) { return f.name == "study_id"; }));
    CHECK(std::any_of(s.required_fields.begin(), s.required_fields.end(),
                      [](const RequiredField& f) {
                        return f.name == "publication_dois" &&
                               f.kind == FieldKind::doi_list;
                      }));
  }
  // the shipped manifest spells out exactly the default schemas
  auto m = load_manifest(kFixtures + "/manifest.json");
  for (auto t : m.supported_types) {
    CHECK(schema_to_json(m.schemas.at(t)) ==
          schema_to_json(default_schema_for(t)));
  }
}

TEST_CASE("schema validation produces one violation per broken field") {
  auto schema = default_schema_for(DataObjectType::study);

  CHECK(validate_against_schema(valid_study_metadata(), schema).empty());

  SUBCASE("missing field") {
    auto md = valid_study_metadata();
    md.erase("description");
    auto v = validate_against_schema(md, schema);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "MISSING_FIELD");
  }
  SUBCASE("empty text") {
    auto md = valid_study_metadata();
    md["title"] = "";
    CHECK(has_code(validate_against_schema(md, schema), "WRONG_KIND"));
  }
  SUBCASE("pid field fails the grammar") {
    auto md = valid_study_metadata();
    md["primary_platform_pid"] = "not a pid";
    CHECK(has_code(validate_against_schema(md, schema), "WRONG_KIND"));
  }
  SUBCASE("doi_list rejects bare strings without the doi scheme") {
    auto md = valid_study_metadata();
    md["publication_dois"] = nlohmann::json::array({"10.1000/demo.2021.001"});
    CHECK(has_code(validate_against_schema(md, schema), "WRONG_KIND"));
  }
  SUBCASE("doi_list rejects non-doi pids") {
    auto md = valid_study_metadata();
    md["publication_dois"] = nlohmann::json::array({"guid:nodea/x"});
    CHECK(has_code(validate_against_schema(md, schema), "WRONG_KIND"));
  }
  SUBCASE("controlled vocabulary recognizes its terms only") {
    auto md = valid_study_metadata();
    md["access_tier"] = "secret";
    CHECK(has_code(validate_against_schema(md, schema), "BAD_TERM"));
  }
  SUBCASE("several faults report together") {
    auto md = valid_study_metadata();
    md.erase("study_id");
    md["access_tier"] = "secret";
    auto v = validate_against_schema(md, schema);
    CHECK(v.size() == 2);
  }
}

TEST_CASE("platform eligibility requires every attested security requirement") {
  auto m = load_manifest(kFixtures + "/manifest.json");
  PlatformDescriptor good{"nodea",
                          "http://127.0.0.1:7001",
                          {"audit-logging", "encryption-at-rest"},
                          {AccessTier::open}};
  auto d = check_platform_eligibility(m, good);
  CHECK(d.eligible);
  CHECK(d.missing.empty());

  PlatformDescriptor partial{"nodec",
                             "http://127.0.0.1:7009",
                             {"audit-logging"},
                             {AccessTier::open}};
  auto dd = check_platform_eligibility(m, partial);
  CHECK(!dd.eligible);
  CHECK(dd.missing == std::set<std::string>{"encryption-at-rest"});
}

TEST_CASE("manifest parsing rejects unknown vocabulary up front") {
  auto j = manifest_to_json(load_manifest(kFixtures + "/manifest.json"));
  SUBCASE("unknown supported type") {
    j["supported_types"].push_back("hologram");
    CHECK_THROWS_AS(manifest_from_json(j), MeshError);
  }
  SUBCASE("unknown linkage mode") {
    j["linkage_mode"] = "telepathy";
    CHECK_THROWS_AS(manifest_from_json(j), MeshError);
  }
  SUBCASE("unknown formality level") {
    j["formality"]["metadata"] = "extreme";
    CHECK_THROWS_AS(manifest_from_json(j), MeshError);
  }
}
