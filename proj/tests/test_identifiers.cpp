// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "meshkit/errors.hpp"
#include "meshkit/pid.hpp"

using namespace meshkit;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_pid(text);
  } catch (const MeshError& e) {
    return e.code();
  }
  return ErrorCode::internal;  // sentinel: no throw
}

}  // namespace

TEST_CASE("well-known registrar identifiers parse") {
  auto journal_doi = parse_pid("doi:10.1038/s41597-024-03041-5");
  CHECK(journal_doi.scheme == PidScheme::doi);
  CHECK(journal_doi.ns == "10.1038");
  CHECK(journal_doi.suffix == "s41597-024-03041-5");
  CHECK(journal_doi.render() == "doi:10.1038/s41597-024-03041-5");

  // scheme and namespace fold to lowercase, suffix case is preserved
  auto rfc_doi = parse_pid("DOI:10.17487/RFC4122");
  CHECK(rfc_doi.scheme == PidScheme::doi);
  CHECK(rfc_doi.ns == "10.17487");
  CHECK(rfc_doi.suffix == "RFC4122");
  CHECK(rfc_doi.render() == "doi:10.17487/RFC4122");

  auto ark = parse_pid("ark:12148/btv1b8449691v");
  CHECK(ark.scheme == PidScheme::ark);
  CHECK(ark.ns == "12148");

  auto guid = parse_pid("guid:nodea/ds-open-1");
  CHECK(guid.scheme == PidScheme::guid);
  CHECK(guid.suffix == "ds-open-1");
}

TEST_CASE("malformed identifiers are rejected with malformed_pid") {
  for (const char* bad : {
           "",                       // nothing at all
           "doi10.1000-x",          // no ':' separator
           "doi:10.1000",           // no '/' separator
           "urn:uuid/abc",          // unknown scheme
           "doi:/suffix",           // empty namespace
           "doi:10.10 00/x",        // whitespace in namespace
           "doi:na_me/x",           // '_' outside namespace grammar
           "guid:nodea/",           // empty suffix
           "guid:nodea/a b",        // whitespace in suffix
           "guid:nodea/caf\xc3\xa9" // non-ASCII suffix byte
       }) {
    CAPTURE(bad);
    CHECK(parse_error(bad) == ErrorCode::malformed_pid);
  }
}

TEST_CASE("parse/render round trip holds over random identifiers") {
  // Oracle: text assembled by hand from independently drawn fields; the
  // parser must recover exactly those fields, and render must reproduce
  // the text byte for byte.
  std::mt19937_64 rng{20260823};
  const std::string ns_chars = "abcdefghijklmnopqrstuvwxyz0123456789.-";
  auto pick = [&](const std::string& alphabet) {
    return alphabet[rng() % alphabet.size()];
  };
  std::string suffix_chars;
  for (char c = 0x21; c < 0x7f; ++c) suffix_chars.push_back(c);

  const PidScheme schemes[] = {PidScheme::doi, PidScheme::guid, PidScheme::ark,
                               PidScheme::mesh};
  for (int i = 0; i < 10000; ++i) {
    auto scheme = schemes[rng() % 4];
    std::string ns;
    for (size_t k = 0, n = 1 + rng() % 12; k < n; ++k)
      ns.push_back(pick(ns_chars));
    std::string suffix;
    for (size_t k = 0, n = 1 + rng() % 20; k < n; ++k)
      suffix.push_back(pick(suffix_chars));

    std::string text =
        std::string(scheme_name(scheme)) + ":" + ns + "/" + suffix;
    auto pid = parse_pid(text);
    REQUIRE(pid.scheme == scheme);
    REQUIRE(pid.ns == ns);
    REQUIRE(pid.suffix == suffix);
    REQUIRE(pid.render() == text);
    // canonicalization is idempotent
    REQUIRE(parse_pid(pid.render()) == pid);
  }
}

TEST_CASE("mixed-case input canonicalizes and then round-trips") {
  auto pid = parse_pid("GUID:NodeA/Slice-01");
  CHECK(pid.ns == "nodea");
  CHECK(pid.suffix == "Slice-01");
  CHECK(pid.render() == "guid:nodea/Slice-01");
  CHECK(parse_pid(pid.render()) == pid);
}

TEST_CASE("minted identifiers have v4-style suffixes and never repeat") {
  PidMinter minter;
  std::set<std::string> seen;
  for (int i = 0; i < 10000; ++i) {
    auto pid = minter.mint(i % 2 ? PidScheme::guid : PidScheme::mesh, "nodea");
    REQUIRE(pid.suffix.size() == 36);
    for (size_t at : {8u, 13u, 18u, 23u}) REQUIRE(pid.suffix[at] == '-');
    REQUIRE(pid.suffix[14] == '4');  // version nibble
    REQUIRE(std::string("89ab").find(pid.suffix[19]) != std::string::npos);
    for (char c : pid.suffix) {
      REQUIRE((c == '-' || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
    }
    // a minted pid always survives its own grammar
    REQUIRE(parse_pid(pid.render()) == pid);
    REQUIRE(seen.insert(pid.render()).second);
  }
}

TEST_CASE("minter normalizes namespaces and refuses foreign schemes") {
  PidMinter minter;
  CHECK(minter.mint(PidScheme::guid, "NodeA").ns == "nodea");
  CHECK_THROWS_AS(minter.mint(PidScheme::doi, "10.1000"), MeshError);
  try {
    minter.mint(PidScheme::ark, "12148");
    FAIL("ark minting should be rejected");
  } catch (const MeshError& e) {
    CHECK(e.code() == ErrorCode::unsupported_scheme);
  }
  CHECK_THROWS_AS(minter.mint(PidScheme::guid, "no_good"), MeshError);
}

TEST_CASE("reserve() blocks journal-replayed suffixes from re-issue") {
  PidMinter minter;
  auto first = minter.mint(PidScheme::mesh, "demo-mesh");
  PidMinter replayed;
  replayed.reserve(first);
  // the reserved suffix can no longer come out of the second minter
  for (int i = 0; i < 1000; ++i) {
    CHECK(replayed.mint(PidScheme::mesh, "demo-mesh").render() !=
          first.render());
  }
}

TEST_CASE("resolver table round-trips and enforces mesh-pid invariants") {
  ResolverTable table;
  auto primary = parse_pid("guid:nodea/ds-open-1");
  auto mesh_pid = parse_pid("mesh:demo-mesh/0a649fe9-1f49-4a7e-8438-9a1c4d3a2b10");

  table.put({primary, "nodea", "http://127.0.0.1:7001", std::nullopt});
  table.put({mesh_pid, "nodea", "http://127.0.0.1:7001", primary});
  CHECK(table.size() == 2);
  CHECK(table.contains(primary));

  auto hit = table.resolve(mesh_pid);
  CHECK(hit.hosting_platform_id == "nodea");
  CHECK(hit.platform_endpoint == "http://127.0.0.1:7001");
  REQUIRE(hit.primary_platform_pid.has_value());
  CHECK(*hit.primary_platform_pid == primary);

  try {
    table.put({mesh_pid, "nodea", "http://127.0.0.1:7001", std::nullopt});
    FAIL("mesh pid without primary must be rejected");
  } catch (const MeshError& e) {
    CHECK(e.code() == ErrorCode::internal);
  }
  try {
    table.resolve(parse_pid("guid:nodea/never-registered"));
    FAIL("unknown pid must not resolve");
  } catch (const MeshError& e) {
    CHECK(e.code() == ErrorCode::unknown_pid);
  }
}
