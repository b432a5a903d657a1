// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace meshkit {

/// PID schemes. doi and ark are foreign (parse-only); guid and mesh are
/// minted locally.
enum class PidScheme { doi, guid, ark, mesh };

std::string_view scheme_name(PidScheme s);
std::optional<PidScheme> scheme_from(std::string_view name);

/// A persistent identifier. Canonical text form is
/// `scheme:namespace/suffix`; scheme and namespace are case-normalized to
/// lowercase, the suffix is case-sensitive.
struct Pid {
  PidScheme scheme = PidScheme::guid;
  std::string ns;      // [a-z0-9.-]+ after normalization
  std::string suffix;  // visible ASCII, no whitespace

  std::string render() const;

  bool operator==(const Pid& other) const = default;
};

/// True iff `ns` matches the namespace grammar [a-z0-9.-]+ after
/// lowercasing (the form parse_pid accepts).
bool valid_pid_namespace(std::string_view ns);

/// Parses canonical PID text. Throws MeshError(malformed_pid) if the
/// scheme is unknown, a separator is missing, a field is empty, or a
/// field violates the grammar.
Pid parse_pid(std::string_view text);

/// Mints guid/mesh PIDs with v4-style 128-bit random suffixes
/// (lowercase hex-with-hyphens, 36 chars). Never re-issues a suffix;
/// check-and-insert is one atomic step under the internal mutex.
class PidMinter {
 public:
  Pid mint(PidScheme scheme, const std::string& ns);

  /// Marks a suffix as already issued (journal replay).
  void reserve(const Pid& pid);

 private:
  std::mutex mutex_;
  std::unordered_set<std::string> minted_;  // "ns/suffix" keys per scheme
};

/// Where a PID lives: the hosting platform and, for mesh-issued PIDs, the
/// primary PID the hosting platform assigned.
struct ResolutionRecord {
  Pid pid;
  std::string hosting_platform_id;
  std::string platform_endpoint;
  std::optional<Pid> primary_platform_pid;
};

class ResolverTable {
 public:
  /// Registers a record. Throws MeshError(internal) if a mesh-scheme PID
  /// arrives without a primary platform PID.
  void put(ResolutionRecord record);

  /// Throws MeshError(unknown_pid) when absent.
  ResolutionRecord resolve(const Pid& pid) const;

  bool contains(const Pid& pid) const;
  size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, ResolutionRecord> records_;
};

}  // namespace meshkit
