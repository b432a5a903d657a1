// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/hub.hpp"

#include <algorithm>
#include <cctype>

#include "httplib.h"
#include "meshkit/crypto.hpp"
#include "meshkit/http_util.hpp"

namespace meshkit {

void TransportLog::record(std::string direction, std::string where,
                          std::string payload) {
  std::lock_guard lock(mutex_);
  entries_.push_back(
      {std::move(direction), std::move(where), std::move(payload)});
}

std::vector<TransportLog::Entry> TransportLog::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

size_t TransportLog::occurrences(std::string_view needle) const {
  std::lock_guard lock(mutex_);
  size_t n = 0;
  for (const auto& e : entries_) {
    for (size_t at = e.payload.find(needle); at != std::string::npos;
         at = e.payload.find(needle, at + 1)) {
      ++n;
    }
  }
  return n;
}

size_t TransportLog::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string encode_pid_path(std::string_view pid) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(pid.size());
  for (unsigned char c : pid) {
    bool plain = std::isalnum(c) || c == '-' || c == '.' || c == '_' ||
                 c == '~' || c == '/' || c == ':';
    if (plain) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xf]);
    }
  }
  return out;
}

NodeGateway::NodeGateway(std::string platform_id, std::string base_url,
                         TransportLog* tap)
    : platform_id_(std::move(platform_id)),
      base_url_(std::move(base_url)),
      tap_(tap) {}

namespace {

nlohmann::json finish(const std::string& where, httplib::Result& result,
                      TransportLog* tap, const std::string& base_url) {
  if (!result) {
    throw MeshError(ErrorCode::node_unreachable,
                    base_url + ": " + httplib::to_string(result.error()));
  }
  if (tap) tap->record("in", where, result->body);
  if (result->status >= 400) {
    throw http::error_from_response(result->status, result->body);
  }
  auto parsed = nlohmann::json::parse(result->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw MeshError(ErrorCode::node_unreachable,
                    base_url + ": non-JSON response");
  }
  return parsed;
}

}  // namespace

nlohmann::json NodeGateway::get_json(
    const std::string& path, const std::optional<std::string>& token,
    const std::map<std::string, std::string>& extra) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(15, 0);
  httplib::Headers headers;
  if (token) headers.emplace("Authorization", "Bearer " + *token);
  for (const auto& [k, v] : extra) headers.emplace(k, v);
  std::string where = "GET " + base_url_ + path;
  if (tap_) tap_->record("out", where, "");
  auto result = client.Get(path, headers);
  return finish(where, result, tap_, base_url_);
}

nlohmann::json NodeGateway::post_json(
    const std::string& path, const nlohmann::json& body,
    const std::optional<std::string>& token,
    const std::map<std::string, std::string>& extra) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(15, 0);
  httplib::Headers headers;
  if (token) headers.emplace("Authorization", "Bearer " + *token);
  for (const auto& [k, v] : extra) headers.emplace(k, v);
  std::string payload = body.dump();
  std::string where = "POST " + base_url_ + path;
  if (tap_) tap_->record("out", where, payload);
  auto result = client.Post(path, headers, payload, "application/json");
  return finish(where, result, tap_, base_url_);
}

std::string_view availability_name(Availability a) {
  switch (a) {
    case Availability::available: return "available";
    case Availability::requires_registration: return "requires_registration";
    case Availability::requires_visa: return "requires_visa";
    case Availability::unavailable: return "unavailable";
  }
  return "unavailable";
}

nlohmann::json usage_report_to_json(const UsageReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"mesh_pid", e.mesh_pid},
                       {"count", e.count},
                       {"identities", e.identities}});
  }
  return {{"platform_id", r.platform_id},
          {"period", {{"start", r.period_start}, {"end", r.period_end}}},
          {"entries", entries}};
}

Hub::Hub(Registry& registry, HubOptions options, TransportLog* tap)
    : registry_(registry), options_(std::move(options)), tap_(tap) {}

void Hub::attach_node(const PlatformDescriptor& descriptor,
                      bool usage_opt_out) {
  registry_.enroll_platform(descriptor);
  gateways_.insert_or_assign(
      descriptor.platform_id,
      NodeGateway(descriptor.platform_id, descriptor.endpoint, tap_));
  if (usage_opt_out) {
    opted_out_.insert(descriptor.platform_id);
  } else {
    opted_out_.erase(descriptor.platform_id);
  }
}

void Hub::trust_issuer(const std::string& issuer, const std::string& secret) {
  issuer_secrets_[issuer] = secret;
}

std::vector<std::string> Hub::attached_platforms() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : gateways_) out.push_back(id);
  return out;
}

NodeGateway& Hub::gateway(const std::string& platform_id) {
  auto it = gateways_.find(platform_id);
  if (it == gateways_.end()) {
    throw MeshError(ErrorCode::unknown_platform,
                    platform_id + " is not attached to this hub");
  }
  return it->second;
}

std::vector<HarvestNodeSummary> Hub::harvest() {
  std::vector<HarvestNodeSummary> out;
  for (auto& [platform_id, gw] : gateways_) {
    HarvestNodeSummary summary;
    summary.platform_id = platform_id;
    try {
      std::vector<std::string> pids;
      std::optional<std::string> cursor;
      do {
        std::string path = "/objects";
        if (cursor) path += "?cursor=" + *cursor;
        auto page = gw.get_json(path);
        for (const auto& p : page.at("pids")) {
          pids.push_back(p.get<std::string>());
        }
        cursor = page.contains("next_cursor")
                     ? std::optional(page.at("next_cursor").get<std::string>())
                     : std::nullopt;
      } while (cursor);
      summary.listed = pids.size();

      for (const auto& pid_text : pids) {
        try {
          auto body =
              gw.get_json("/objects/" + encode_pid_path(pid_text) +
                          "/metadata");
          const auto& metadata = body.at("metadata");
          RegistrationRequest req;
          auto type_name = metadata.value("object_type", std::string());
          auto type = object_type_from(type_name);
          if (!type) {
            throw MeshError(ErrorCode::unsupported_object_type,
                            pid_text + ": object_type \"" + type_name + "\"");
          }
          req.object_type = *type;
          req.hosting_platform_id = platform_id;
          req.primary_platform_pid = parse_pid(pid_text);
          req.metadata = metadata;
          req.submitted_by = SubmissionChannel::platform_harvest;
          auto outcome = registry_.register_object(req);
          summary.upserts += 1;
          summary.new_records += outcome.created ? 1 : 0;
          summary.changed += outcome.changed ? 1 : 0;
        } catch (const MeshError& e) {
          if (e.code() == ErrorCode::node_unreachable) throw;
          summary.schema_failures.push_back(pid_text + ": " + e.what());
        }
      }
    } catch (const MeshError& e) {
      summary.error = e.what();
    }
    out.push_back(std::move(summary));
  }
  return out;
}

namespace {

std::optional<AccessTier> tier_of(const DmmRecord& record) {
  auto it = record.metadata.find("access_tier");
  if (it == record.metadata.end() || !it->is_string()) return std::nullopt;
  return access_tier_from(it->get<std::string>());
}

}  // namespace

Availability Hub::annotate(const DmmRecord& record,
                           const std::optional<Token>& token,
                           const std::optional<std::string>& token_wire) {
  auto tier = tier_of(record);
  if (!tier) return Availability::unavailable;

  if (options_.live_authz) {
    auto it = gateways_.find(record.hosting_platform_id);
    if (it == gateways_.end()) return Availability::unavailable;
    try {
      it->second.get_json(
          "/objects/" + encode_pid_path(record.primary_platform_pid.render()) +
              "/access",
          token_wire);
      return Availability::available;
    } catch (const MeshError& e) {
      if (e.code() != ErrorCode::not_authorized) {
        return Availability::unavailable;
      }
      // fall through to the tier-based denial mapping
    }
  } else if (*tier == AccessTier::open) {
    return Availability::available;
  } else if (*tier == AccessTier::registered) {
    if (token && token->registered) return Availability::available;
  } else if (token && token->registered &&
             token->visa_for(record.primary_platform_pid,
                             record.hosting_platform_id, unix_now())) {
    return Availability::available;
  }

  switch (*tier) {
    case AccessTier::open: return Availability::available;
    case AccessTier::registered: return Availability::requires_registration;
    case AccessTier::controlled: return Availability::requires_visa;
  }
  return Availability::unavailable;
}

SearchPage Hub::search(const QueryFilter& filter,
                       const std::optional<std::string>& cursor,
                       size_t page_size,
                       const std::optional<std::string>& token) {
  std::optional<Token> verified;
  if (token) {
    verified = TokenCodec(issuer_secrets_).verify(*token, unix_now());
  }
  std::optional<std::string> caller;
  if (verified) caller = verified->subject;

  auto page = registry_.query_records(filter, cursor, page_size, caller);
  SearchPage out;
  out.next_cursor = page.next_cursor;
  for (auto& record : page.records) {
    SearchResult result;
    result.availability = annotate(record, verified, token);
    result.record = std::move(record);
    out.results.push_back(std::move(result));
  }
  return out;
}

TransferGrant Hub::broker_access(const std::optional<std::string>& token,
                                 const Pid& mesh_pid,
                                 const std::string& aae_id) {
  auto record = registry_.get_record(mesh_pid, std::string("hub"));
  auto it = gateways_.find(record.hosting_platform_id);
  if (it == gateways_.end()) {
    throw MeshError(ErrorCode::node_unreachable,
                    "no gateway to " + record.hosting_platform_id);
  }

  auto body = it->second.post_json(
      "/objects/" + encode_pid_path(record.primary_platform_pid.render()) +
          "/transfer",
      {{"aae_id", aae_id}}, token);

  TransferGrant grant;
  grant.pid = body.at("pid").get<std::string>();
  grant.aae_id = body.at("aae_id").get<std::string>();
  grant.constraints.downloadable_out_of_aae =
      body.at("constraints").value("downloadable_out_of_aae", false);
  grant.constraints.redistributable =
      body.at("constraints").value("redistributable", false);
  grant.transfer_url = body.value("transfer_url", std::string());

  UsageEvent event;
  event.mesh_pid = mesh_pid.render();
  event.hosting_platform_id = record.hosting_platform_id;
  event.access_tier = tier_of(record).value_or(AccessTier::open);
  event.timestamp = unix_now();
  if (token) {
    auto verified = TokenCodec(issuer_secrets_).verify(*token, unix_now());
    if (verified && (event.access_tier >= AccessTier::registered ||
                     options_.leak_open_identities)) {
      event.subject = verified->subject;
    }
  }
  {
    std::lock_guard lock(mutex_);
    events_.push_back(std::move(event));
  }
  return grant;
}

std::vector<UsageReport> Hub::report_usage(int64_t period_start,
                                           int64_t period_end) {
  // platform -> pid -> (count, tier, identities)
  struct Bucket {
    uint64_t count = 0;
    AccessTier tier = AccessTier::open;
    std::set<std::string> identities;
  };
  std::map<std::string, std::map<std::string, Bucket>> grouped;
  {
    std::lock_guard lock(mutex_);
    for (const auto& e : events_) {
      if (e.timestamp < period_start || e.timestamp > period_end) continue;
      auto& bucket = grouped[e.hosting_platform_id][e.mesh_pid];
      bucket.count += 1;
      bucket.tier = e.access_tier;
      if (e.subject &&
          (e.access_tier >= AccessTier::registered ||
           options_.leak_open_identities)) {
        bucket.identities.insert(*e.subject);
      }
    }
  }

  std::vector<UsageReport> out;
  for (auto& [platform_id, buckets] : grouped) {
    if (!registry_.manifest().usage_stats_required &&
        opted_out_.count(platform_id)) {
      continue;  // Pillar 9 is optional and this node opted out
    }
    UsageReport report;
    report.platform_id = platform_id;
    report.period_start = period_start;
    report.period_end = period_end;
    for (auto& [pid, bucket] : buckets) {
      UsageReportEntry entry;
      entry.mesh_pid = pid;
      entry.count = bucket.count;
      entry.identities.assign(bucket.identities.begin(),
                              bucket.identities.end());
      report.entries.push_back(std::move(entry));
    }
    if (!deliver(report)) {
      std::lock_guard lock(mutex_);
      retry_queue_.push_back(report);
    }
    out.push_back(std::move(report));
  }
  return out;
}

bool Hub::deliver(const UsageReport& report) {
  auto it = gateways_.find(report.platform_id);
  if (it == gateways_.end()) return false;
  try {
    it->second.post_json("/usage/reports", usage_report_to_json(report));
    return true;
  } catch (const MeshError&) {
    return false;
  }
}

size_t Hub::retry_pending() {
  std::deque<UsageReport> queue;
  {
    std::lock_guard lock(mutex_);
    queue.swap(retry_queue_);
  }
  size_t delivered = 0;
  for (auto& report : queue) {
    if (deliver(report)) {
      ++delivered;
    } else {
      std::lock_guard lock(mutex_);
      retry_queue_.push_back(std::move(report));
    }
  }
  return delivered;
}

size_t Hub::pending_report_count() const {
  std::lock_guard lock(mutex_);
  return retry_queue_.size();
}

std::optional<std::string> Hub::notice_for_session(
    const std::optional<std::string>& session_id) {
  std::lock_guard lock(mutex_);
  if (session_id) {
    if (!seen_sessions_.insert(*session_id).second) return std::nullopt;
    notice_log_.push_back(*session_id);
  } else {
    notice_log_.push_back("(anonymous)");
  }
  return registry_.manifest().usage_collection_notice;
}

size_t Hub::notices_emitted() const {
  std::lock_guard lock(mutex_);
  return notice_log_.size();
}

std::vector<LinkedPair> Hub::link_subjects(
    const std::vector<std::string>& a, const std::vector<std::string>& b)
    const {
  if (registry_.manifest().linkage_mode != LinkageMode::guid) {
    throw MeshError(ErrorCode::linkage_disabled,
                    "manifest linkage_mode is none");
  }
  auto tokenize = [this](const std::string& raw) {
    auto begin = raw.find_first_not_of(" \t\r\n");
    auto end = raw.find_last_not_of(" \t\r\n");
    std::string norm = begin == std::string::npos
                           ? std::string()
                           : raw.substr(begin, end - begin + 1);
    std::transform(norm.begin(), norm.end(), norm.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    return crypto::hmac_sha256_hex(options_.linkage_key, norm);
  };

  std::map<std::string, std::vector<size_t>> tokens_a;
  for (size_t i = 0; i < a.size(); ++i) {
    tokens_a[tokenize(a[i])].push_back(i);
  }
  std::vector<LinkedPair> out;
  for (size_t j = 0; j < b.size(); ++j) {
    auto token = tokenize(b[j]);
    auto it = tokens_a.find(token);
    if (it == tokens_a.end()) continue;
    for (size_t i : it->second) out.push_back({i, j, token});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.index_a, x.index_b) < std::tie(y.index_a, y.index_b);
  });
  return out;
}

std::vector<UsageEvent> Hub::usage_events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

}  // namespace meshkit
