// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/pid.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <random>

#include "meshkit/errors.hpp"

namespace meshkit {

namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool valid_suffix(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c > 0x20 && c < 0x7f;  // visible ASCII, no whitespace
  });
}

}  // namespace

std::string_view scheme_name(PidScheme s) {
  switch (s) {
    case PidScheme::doi: return "doi";
    case PidScheme::guid: return "guid";
    case PidScheme::ark: return "ark";
    case PidScheme::mesh: return "mesh";
  }
  return "guid";
}

std::optional<PidScheme> scheme_from(std::string_view name) {
  if (name == "doi") return PidScheme::doi;
  if (name == "guid") return PidScheme::guid;
  if (name == "ark") return PidScheme::ark;
  if (name == "mesh") return PidScheme::mesh;
  return std::nullopt;
}

std::string Pid::render() const {
  std::string out(scheme_name(scheme));
  out += ':';
  out += ns;
  out += '/';
  out += suffix;
  return out;
}

bool valid_pid_namespace(std::string_view ns) {
  if (ns.empty()) return false;
  return std::all_of(ns.begin(), ns.end(), [](unsigned char c) {
    c = static_cast<unsigned char>(std::tolower(c));
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
           c == '-';
  });
}

Pid parse_pid(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw MeshError(ErrorCode::malformed_pid,
                    "missing ':' separator in \"" + std::string(text) + "\"");
  }
  auto slash = text.find('/', colon + 1);
  if (slash == std::string_view::npos) {
    throw MeshError(ErrorCode::malformed_pid,
                    "missing '/' separator in \"" + std::string(text) + "\"");
  }
  auto scheme_text = lowered(text.substr(0, colon));
  auto scheme = scheme_from(scheme_text);
  if (!scheme) {
    throw MeshError(ErrorCode::malformed_pid,
                    "unknown scheme \"" + scheme_text + "\"");
  }
  auto ns = lowered(text.substr(colon + 1, slash - colon - 1));
  if (!valid_pid_namespace(ns)) {
    throw MeshError(ErrorCode::malformed_pid,
                    "invalid namespace \"" + ns + "\"");
  }
  std::string suffix(text.substr(slash + 1));
  if (!valid_suffix(suffix)) {
    throw MeshError(ErrorCode::malformed_pid, "invalid suffix");
  }
  return Pid{*scheme, std::move(ns), std::move(suffix)};
}

Pid PidMinter::mint(PidScheme scheme, const std::string& ns) {
  if (scheme != PidScheme::guid && scheme != PidScheme::mesh) {
    throw MeshError(ErrorCode::unsupported_scheme,
                    std::string(scheme_name(scheme)) +
                        " PIDs are registrar-issued and cannot be minted here");
  }
  auto normalized = lowered(ns);
  if (!valid_pid_namespace(normalized)) {
    throw MeshError(ErrorCode::malformed_pid,
                    "invalid namespace \"" + ns + "\"");
  }

  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<uint64_t> dist;
  static constexpr char hex[] = "0123456789abcdef";

  std::lock_guard lock(mutex_);
  for (;;) {
    std::array<unsigned char, 16> bytes{};
    uint64_t hi = dist(rng), lo = dist(rng);
    for (int i = 0; i < 8; ++i) bytes[i] = (hi >> (8 * i)) & 0xff;
    for (int i = 0; i < 8; ++i) bytes[8 + i] = (lo >> (8 * i)) & 0xff;
    bytes[6] = (bytes[6] & 0x0f) | 0x40;  // version 4
    bytes[8] = (bytes[8] & 0x3f) | 0x80;  // RFC 4122 variant

    std::string suffix;
    suffix.reserve(36);
    for (size_t i = 0; i < bytes.size(); ++i) {
      if (i == 4 || i == 6 || i == 8 || i == 10) suffix.push_back('-');
      suffix.push_back(hex[bytes[i] >> 4]);
      suffix.push_back(hex[bytes[i] & 0x0f]);
    }

    std::string key = std::string(scheme_name(scheme)) + ":" + normalized +
                      "/" + suffix;
    if (minted_.insert(std::move(key)).second) {
      return Pid{scheme, normalized, std::move(suffix)};
    }
    // collision: draw again
  }
}

void PidMinter::reserve(const Pid& pid) {
  std::lock_guard lock(mutex_);
  minted_.insert(pid.render());
}

void ResolverTable::put(ResolutionRecord record) {
  if (record.pid.scheme == PidScheme::mesh && !record.primary_platform_pid) {
    throw MeshError(ErrorCode::internal,
                    "mesh PID resolution requires a primary platform PID");
  }
  std::lock_guard lock(mutex_);
  records_[record.pid.render()] = std::move(record);
}

ResolutionRecord ResolverTable::resolve(const Pid& pid) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(pid.render());
  if (it == records_.end()) {
    throw MeshError(ErrorCode::unknown_pid,
                    "no resolution record for " + pid.render());
  }
  return it->second;
}

bool ResolverTable::contains(const Pid& pid) const {
  std::lock_guard lock(mutex_);
  return records_.count(pid.render()) > 0;
}

size_t ResolverTable::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace meshkit
