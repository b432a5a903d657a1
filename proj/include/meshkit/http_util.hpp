// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "meshkit/errors.hpp"

namespace meshkit::http {

inline std::optional<std::string> bearer_token(const httplib::Request& req) {
  auto header = req.get_header_value("Authorization");
  if (header.rfind("Bearer ", 0) == 0 && header.size() > 7) {
    return header.substr(7);
  }
  return std::nullopt;
}

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_pid:
    case ErrorCode::malformed_cursor:
    case ErrorCode::schema_violation:
    case ErrorCode::unsupported_object_type:
    case ErrorCode::unsupported_scheme:
    case ErrorCode::bad_fixture:
      return 400;
    case ErrorCode::bad_credentials:
      return 401;
    case ErrorCode::not_authorized:
    case ErrorCode::aae_not_authorized:
    case ErrorCode::ineligible_platform:
    case ErrorCode::not_approved:
    case ErrorCode::federated_disabled:
    case ErrorCode::linkage_disabled:
      return 403;
    case ErrorCode::unknown_pid:
    case ErrorCode::unknown_platform:
    case ErrorCode::unknown_workflow:
      return 404;
    case ErrorCode::not_pending:
      return 409;
    case ErrorCode::node_unreachable:
      return 502;
    default:
      return 500;
  }
}

inline void send_json(httplib::Response& res, const nlohmann::json& body,
                      int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, const MeshError& e) {
  send_json(res,
            {{"error",
              {{"code", std::string(error_code_name(e.code()))},
               {"message", e.message()}}}},
            status_for(e.code()));
}

/// Runs a handler body, converting MeshError and json errors to the wire
/// error shape.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const MeshError& e) {
    send_error(res, e);
  } catch (const nlohmann::json::exception& e) {
    send_error(res, MeshError(ErrorCode::bad_fixture,
                              std::string("malformed request body: ") +
                                  e.what()));
  } catch (const std::exception& e) {
    send_error(res, MeshError(ErrorCode::internal, e.what()));
  }
}

/// Maps a wire error body back to the MeshError it came from (client side
/// of the same convention).
inline MeshError error_from_response(int status, const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (!j.is_discarded() && j.contains("error")) {
    const auto& e = j.at("error");
    auto code_name = e.value("code", std::string());
    auto message = e.value("message", std::string());
    for (int c = 0; c <= static_cast<int>(ErrorCode::internal); ++c) {
      auto code = static_cast<ErrorCode>(c);
      if (error_code_name(code) == code_name) return {code, message};
    }
  }
  return {ErrorCode::internal, "HTTP " + std::to_string(status)};
}

}  // namespace meshkit::http
