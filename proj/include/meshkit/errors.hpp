// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meshkit {

enum class ErrorCode {
  malformed_pid,
  unsupported_scheme,
  unknown_pid,
  unsupported_object_type,
  schema_violation,
  unknown_platform,
  ineligible_platform,
  bad_credentials,
  not_authorized,
  aae_not_authorized,
  malformed_cursor,
  linkage_disabled,
  not_approved,
  unknown_workflow,
  not_pending,
  node_unreachable,
  federated_disabled,
  bad_fixture,
  port_in_use,
  internal,
};

constexpr std::string_view error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::malformed_pid: return "MalformedPid";
    case ErrorCode::unsupported_scheme: return "UnsupportedScheme";
    case ErrorCode::unknown_pid: return "UnknownPid";
    case ErrorCode::unsupported_object_type: return "UnsupportedObjectType";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::unknown_platform: return "UnknownPlatform";
    case ErrorCode::ineligible_platform: return "IneligiblePlatform";
    case ErrorCode::bad_credentials: return "BadCredentials";
    case ErrorCode::not_authorized: return "NotAuthorized";
    case ErrorCode::aae_not_authorized: return "AaeNotAuthorized";
    case ErrorCode::malformed_cursor: return "MalformedCursor";
    case ErrorCode::linkage_disabled: return "LinkageDisabled";
    case ErrorCode::not_approved: return "NotApproved";
    case ErrorCode::unknown_workflow: return "UnknownWorkflow";
    case ErrorCode::not_pending: return "NotPending";
    case ErrorCode::node_unreachable: return "NodeUnreachable";
    case ErrorCode::federated_disabled: return "FederatedDisabled";
    case ErrorCode::bad_fixture: return "BadFixture";
    case ErrorCode::port_in_use: return "PortInUse";
    case ErrorCode::internal: return "Internal";
  }
  return "Internal";
}

/// The one exception type crossing module boundaries. HTTP layers map
/// `code()` to a status; CLI maps it to an exit message.
class MeshError : public std::runtime_error {
 public:
  MeshError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace meshkit
