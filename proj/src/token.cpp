// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/token.hpp"

#include <chrono>

#include "json.hpp"
#include "meshkit/crypto.hpp"
#include "meshkit/errors.hpp"

namespace meshkit {

int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::optional<Visa> Token::visa_for(const Pid& pid,
                                    const std::string& platform_id,
                                    int64_t now) const {
  const std::string platform_wide = "guid:" + platform_id + "/ALL";
  for (const auto& v : visas) {
    if (now >= v.expiry) continue;
    auto scope = v.scope_pid.render();
    if (scope == pid.render() || scope == platform_wide) return v;
  }
  return std::nullopt;
}

namespace {

nlohmann::json payload_json(const Token& t) {
  nlohmann::json visas = nlohmann::json::array();
  for (const auto& v : t.visas) {
    visas.push_back({{"visa_type", v.visa_type},
                     {"scope", v.scope_pid.render()},
                     {"issuer", v.issuer},
                     {"expiry", v.expiry}});
  }
  return {{"sub", t.subject},
          {"iss", t.issuer},
          {"exp", t.expiry},
          {"registered", t.registered},
          {"visas", visas}};
}

Token payload_from_json(const nlohmann::json& j) {
  Token t;
  t.subject = j.at("sub").get<std::string>();
  t.issuer = j.at("iss").get<std::string>();
  t.expiry = j.at("exp").get<int64_t>();
  t.registered = j.at("registered").get<bool>();
  for (const auto& v : j.at("visas")) {
    Visa visa;
    visa.visa_type = v.at("visa_type").get<std::string>();
    visa.scope_pid = parse_pid(v.at("scope").get<std::string>());
    visa.issuer = v.at("issuer").get<std::string>();
    visa.expiry = v.at("expiry").get<int64_t>();
    t.visas.push_back(std::move(visa));
  }
  return t;
}

}  // namespace

std::string TokenCodec::encode(const Token& token,
                               const std::string& issuer) const {
  auto it = secrets_.find(issuer);
  if (it == secrets_.end()) {
    throw MeshError(ErrorCode::internal, "no secret for issuer " + issuer);
  }
  auto payload = payload_json(token).dump();
  return crypto::base64url_encode(payload) + "." +
         crypto::hmac_sha256_hex(it->second, payload);
}

std::optional<Token> TokenCodec::verify(const std::string& wire,
                                        int64_t now) const {
  auto dot = wire.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= wire.size()) {
    return std::nullopt;
  }
  std::string payload;
  try {
    payload = crypto::base64url_decode(wire.substr(0, dot));
  } catch (const MeshError&) {
    return std::nullopt;
  }
  nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;

  std::string issuer = j.value("iss", std::string());
  auto it = secrets_.find(issuer);
  if (it == secrets_.end()) return std::nullopt;
  if (crypto::hmac_sha256_hex(it->second, payload) != wire.substr(dot + 1)) {
    return std::nullopt;
  }
  try {
    Token t = payload_from_json(j);
    if (t.expired(now)) return std::nullopt;
    return t;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace meshkit
