// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/federated.hpp"

#include "meshkit/errors.hpp"

namespace meshkit {

std::string_view review_status_name(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::pending_review: return "pending_review";
    case ReviewStatus::released: return "released";
    case ReviewStatus::withheld: return "withheld";
  }
  return "pending_review";
}

std::optional<ReviewStatus> review_status_from(std::string_view name) {
  if (name == "pending_review") return ReviewStatus::pending_review;
  if (name == "released") return ReviewStatus::released;
  if (name == "withheld") return ReviewStatus::withheld;
  return std::nullopt;
}

nlohmann::json workflow_result_to_json(const WorkflowResult& r, bool redact) {
  nlohmann::json per_platform = nlohmann::json::object();
  for (const auto& [platform, outcome] : r.per_platform) {
    nlohmann::json slot = {{"status", outcome.status},
                           {"requires_review", outcome.requires_review}};
    if (redact) {
      slot["value"] = nullptr;
      slot["redacted"] = true;
    } else {
      slot["value"] = outcome.value;
    }
    if (!outcome.detail.empty()) slot["detail"] = outcome.detail;
    per_platform[platform] = std::move(slot);
  }
  return {{"workflow_id", r.workflow_id},
          {"review_status", std::string(review_status_name(r.review_status))},
          {"per_platform", per_platform}};
}

std::string FederatedExecutor::submit(const WorkflowRequest& req,
                                      const std::optional<std::string>& token) {
  if (!req.approved) {
    throw MeshError(ErrorCode::not_approved,
                    "workflow is not approved for submission");
  }
  if (req.target_platforms.empty()) {
    throw MeshError(ErrorCode::bad_fixture, "target_platforms is empty");
  }
  for (const auto& platform : req.target_platforms) {
    hub_.gateway(platform);  // throws UnknownPlatform for unattached targets
  }

  std::lock_guard lock(mutex_);
  if (!req.workflow_id.empty() && workflows_.count(req.workflow_id)) {
    throw MeshError(ErrorCode::bad_fixture,
                    "workflow id already submitted: " + req.workflow_id);
  }
  Entry entry;
  entry.request = req;
  if (entry.request.workflow_id.empty()) {
    entry.request.workflow_id = "wf-" + std::to_string(next_id_++);
  }
  entry.token = token;
  entry.result.workflow_id = entry.request.workflow_id;
  for (const auto& platform : req.target_platforms) {
    entry.result.per_platform[platform] = PlatformOutcome{"pending", {}, false,
                                                          ""};
  }
  entry.result.review_status = ReviewStatus::pending_review;
  auto id = entry.request.workflow_id;
  workflows_[id] = std::move(entry);
  return id;
}

WorkflowResult FederatedExecutor::execute(const std::string& workflow_id) {
  WorkflowRequest request;
  std::optional<std::string> token;
  {
    std::lock_guard lock(mutex_);
    auto it = workflows_.find(workflow_id);
    if (it == workflows_.end()) {
      throw MeshError(ErrorCode::unknown_workflow, workflow_id);
    }
    if (it->second.executed) return it->second.result;
    request = it->second.request;
    token = it->second.token;
  }

  WorkflowResult result;
  result.workflow_id = workflow_id;
  bool any_review = false;
  for (const auto& platform : request.target_platforms) {
    PlatformOutcome outcome;
    try {
      auto body = hub_.gateway(platform).post_json(
          "/federated/execute",
          {{"computation", request.computation},
           {"token", token ? nlohmann::json(*token) : nlohmann::json()}});
      outcome.status = body.value("status", std::string("ok"));
      outcome.value = body.value("value", nlohmann::json());
      outcome.requires_review = body.value("requires_review", false);
      any_review = any_review || outcome.requires_review;
    } catch (const MeshError& e) {
      bool policy = e.code() == ErrorCode::federated_disabled ||
                    e.code() == ErrorCode::not_authorized;
      outcome.status = policy ? "rejected" : "error";
      outcome.detail = e.what();
    }
    result.per_platform[platform] = std::move(outcome);
  }
  result.review_status =
      any_review ? ReviewStatus::pending_review : ReviewStatus::released;

  std::lock_guard lock(mutex_);
  auto& entry = workflows_.at(workflow_id);
  if (!entry.executed) {
    entry.executed = true;
    entry.result = result;
  }
  return entry.result;
}

WorkflowResult FederatedExecutor::review(const std::string& workflow_id,
                                         const std::string& decision,
                                         const std::string& reviewer) {
  auto status = review_status_from(decision);
  if (!status || *status == ReviewStatus::pending_review) {
    throw MeshError(ErrorCode::bad_fixture,
                    "decision must be released or withheld");
  }
  std::lock_guard lock(mutex_);
  auto it = workflows_.find(workflow_id);
  if (it == workflows_.end()) {
    throw MeshError(ErrorCode::unknown_workflow, workflow_id);
  }
  if (!it->second.executed ||
      it->second.result.review_status != ReviewStatus::pending_review) {
    throw MeshError(ErrorCode::not_pending,
                    workflow_id + " is not pending review");
  }
  it->second.result.review_status = *status;
  it->second.reviewer = reviewer;
  return it->second.result;
}

WorkflowResult FederatedExecutor::result(const std::string& workflow_id) const {
  std::lock_guard lock(mutex_);
  auto it = workflows_.find(workflow_id);
  if (it == workflows_.end()) {
    throw MeshError(ErrorCode::unknown_workflow, workflow_id);
  }
  return it->second.result;
}

bool FederatedExecutor::redact_for_submitter(
    const std::string& workflow_id) const {
  std::lock_guard lock(mutex_);
  auto it = workflows_.find(workflow_id);
  if (it == workflows_.end()) {
    throw MeshError(ErrorCode::unknown_workflow, workflow_id);
  }
  return it->second.result.review_status != ReviewStatus::released;
}

}  // namespace meshkit
