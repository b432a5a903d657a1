// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace meshkit::crypto {

/// SHA-256 of `data`, lowercase hex.
std::string sha256_hex(std::string_view data);

/// HMAC-SHA256 keyed with `key`, lowercase hex. Integrity tags for tokens
/// and linkage tokens both go through here.
std::string hmac_sha256_hex(std::string_view key, std::string_view data);

/// base64url without padding (RFC 4648 §5).
std::string base64url_encode(std::string_view data);

/// Decodes base64url (padding optional). Throws MeshError(internal) on
/// non-alphabet input.
std::string base64url_decode(std::string_view text);

}  // namespace meshkit::crypto
