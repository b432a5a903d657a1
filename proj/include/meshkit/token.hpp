// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshkit/pid.hpp"

namespace meshkit {

/// A controlled-access grant scoped to one PID (or to the platform-wide
/// scope PID `guid:<platform>/ALL`). Expired visas confer nothing.
struct Visa {
  std::string visa_type = "controlled_access_grant";
  Pid scope_pid;
  std::string issuer;
  int64_t expiry = 0;  // unix seconds
};

/// A passport-style bearer token. Integrity comes from a keyed-hash tag
/// with a per-issuer secret; the wire form is
/// base64url(payload-json) "." hmac-sha256-hex(secret, payload-json).
struct Token {
  std::string subject;
  std::string issuer;
  int64_t expiry = 0;
  bool registered = false;
  std::vector<Visa> visas;

  bool expired(int64_t now) const { return now >= expiry; }

  /// The visa covering `pid` on `platform_id`, if any unexpired visa is
  /// scoped to the exact PID or to `guid:<platform_id>/ALL`.
  std::optional<Visa> visa_for(const Pid& pid, const std::string& platform_id,
                               int64_t now) const;
};

/// Issues and verifies tokens against a table of trusted issuer secrets.
/// Verification is two-step: decode the unverified payload to learn the
/// issuer, then check the tag with that issuer's secret.
class TokenCodec {
 public:
  explicit TokenCodec(std::map<std::string, std::string> issuer_secrets)
      : secrets_(std::move(issuer_secrets)) {}

  std::string encode(const Token& token, const std::string& issuer) const;

  /// nullopt for garbage, unknown issuer, bad tag, or expired token.
  std::optional<Token> verify(const std::string& wire, int64_t now) const;

  bool knows_issuer(const std::string& issuer) const {
    return secrets_.count(issuer) > 0;
  }

 private:
  std::map<std::string, std::string> secrets_;
};

int64_t unix_now();

}  // namespace meshkit
