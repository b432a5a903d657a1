// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "meshkit/hub.hpp"

namespace meshkit {

struct WorkflowRequest {
  std::string workflow_id;  // generated when empty
  bool approved = false;
  std::vector<std::string> target_platforms;
  // {"aggregate": "count"|"sum_size"|"checksum_list",
  //  "filter": {"object_type": "..."} }
  nlohmann::json computation = nlohmann::json::object();
  std::string submitter;
};

enum class ReviewStatus { pending_review, released, withheld };

std::string_view review_status_name(ReviewStatus s);
std::optional<ReviewStatus> review_status_from(std::string_view name);

struct PlatformOutcome {
  std::string status;  // ok | rejected | error
  nlohmann::json value;
  bool requires_review = false;
  std::string detail;  // error/rejection message
};

struct WorkflowResult {
  std::string workflow_id;
  std::map<std::string, PlatformOutcome> per_platform;
  ReviewStatus review_status = ReviewStatus::released;
};

/// Serializes a result. `redact` hides aggregate values (submitter view
/// while pending or withheld); the per-platform statuses stay visible.
nlohmann::json workflow_result_to_json(const WorkflowResult& r, bool redact);

/// Move-compute-to-data executor. Workflows are declarative aggregates
/// fanned out to hub-attached nodes; each node evaluates over the objects
/// the submitter's token grants, and only aggregate values come back.
/// Handle state transitions are serialized behind one mutex; per-platform
/// execution happens outside it.
class FederatedExecutor {
 public:
  explicit FederatedExecutor(Hub& hub) : hub_(hub) {}

  /// Rejects unapproved requests at the door. Returns the workflow id.
  std::string submit(const WorkflowRequest& req,
                     const std::optional<std::string>& token);

  /// Runs every platform slot that has not run yet; per-platform errors
  /// are captured in the slot, never aborting the others. Idempotent.
  WorkflowResult execute(const std::string& workflow_id);

  /// decision ∈ {released, withheld}. Throws NotPending unless the
  /// workflow is pending_review.
  WorkflowResult review(const std::string& workflow_id,
                        const std::string& decision,
                        const std::string& reviewer);

  /// The stored result; `submitter_view` redacts values unless released.
  WorkflowResult result(const std::string& workflow_id) const;
  bool redact_for_submitter(const std::string& workflow_id) const;

 private:
  struct Entry {
    WorkflowRequest request;
    std::optional<std::string> token;
    bool executed = false;
    WorkflowResult result;
    std::string reviewer;
  };

  Hub& hub_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> workflows_;
  size_t next_id_ = 1;
};

}  // namespace meshkit
