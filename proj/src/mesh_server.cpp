// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/mesh_server.hpp"

#include <limits>

#include "meshkit/http_util.hpp"
#include "meshkit/token.hpp"

namespace meshkit {

using http::bearer_token;
using http::guarded;
using http::send_json;

namespace {

int bind_server(httplib::Server& server, const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
    if (bound <= 0) throw MeshError(ErrorCode::port_in_use, "cannot bind " + host);
  } else if (!server.bind_to_port(host, port)) {
    throw MeshError(ErrorCode::port_in_use,
                    host + ":" + std::to_string(port) + " is taken");
  }
  return bound;
}

QueryFilter filter_from(const httplib::Request& req) {
  QueryFilter filter;
  if (req.has_param("type")) {
    auto name = req.get_param_value("type");
    auto type = object_type_from(name);
    if (!type) {
      throw MeshError(ErrorCode::unsupported_object_type,
                      "unknown object type \"" + name + "\"");
    }
    filter.object_type = *type;
  }
  if (req.has_param("platform")) {
    filter.hosting_platform_id = req.get_param_value("platform");
  }
  if (req.has_param("q")) filter.text = req.get_param_value("q");
  return filter;
}

std::optional<std::string> cursor_from(const httplib::Request& req) {
  if (req.has_param("cursor")) return req.get_param_value("cursor");
  return std::nullopt;
}

size_t page_size_from(const httplib::Request& req, size_t fallback = 50) {
  if (!req.has_param("page_size")) return fallback;
  try {
    return std::stoul(req.get_param_value("page_size"));
  } catch (const std::exception&) {
    throw MeshError(ErrorCode::malformed_cursor,
                    "page_size is not a number");
  }
}

}  // namespace

RegistryServer::RegistryServer(Registry& registry) : registry_(registry) {
  wire_routes();
}

RegistryServer::~RegistryServer() { stop(); }

void RegistryServer::trust_issuer(const std::string& issuer,
                                  const std::string& secret) {
  issuer_secrets_[issuer] = secret;
}

std::optional<std::string> RegistryServer::caller_of(
    const httplib::Request& req) const {
  auto wire = bearer_token(req);
  if (!wire) return std::nullopt;
  auto token = TokenCodec(issuer_secrets_).verify(*wire, unix_now());
  if (!token) return std::nullopt;
  return token->subject;
}

int RegistryServer::start(const std::string& host, int port) {
  int bound = bind_server(server_, host, port);
  url_ = "http://" + host + ":" + std::to_string(bound);
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return bound;
}

void RegistryServer::stop() {
  if (thread_.joinable()) {
    server_.stop();
    thread_.join();
  }
}

void RegistryServer::wire_routes() {
  server_.Post("/dmms/register", [this](const httplib::Request& req,
                                        httplib::Response& res) {
    guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      RegistrationRequest r;
      auto type_name = body.at("object_type").get<std::string>();
      auto type = object_type_from(type_name);
      if (!type) {
        throw MeshError(ErrorCode::unsupported_object_type,
                        "unknown object type \"" + type_name + "\"");
      }
      r.object_type = *type;
      r.hosting_platform_id =
          body.at("hosting_platform_id").get<std::string>();
      r.primary_platform_pid =
          parse_pid(body.at("primary_platform_pid").get<std::string>());
      r.metadata = body.value("metadata", nlohmann::json::object());
      if (body.contains("submitted_by")) {
        auto channel =
            submission_channel_from(body.at("submitted_by").get<std::string>());
        if (channel) r.submitted_by = *channel;
      } else {
        r.submitted_by = SubmissionChannel::contributor_api;
      }
      auto outcome = registry_.register_object(r);
      send_json(res, {{"mesh_pid", outcome.record.mesh_pid.render()},
                      {"created", outcome.created},
                      {"changed", outcome.changed},
                      {"record", record_to_json(outcome.record)}});
    });
  });

  server_.Post(R"(/dmms/records/(.+)/supplement)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto body = nlohmann::json::parse(req.body);
                   auto source = provenance_source_from(
                       body.value("source", std::string("hub_supplement")));
                   if (!source) {
                     throw MeshError(ErrorCode::bad_fixture,
                                     "unknown provenance source");
                   }
                   auto record = registry_.supplement_metadata(
                       parse_pid(std::string(req.matches[1])),
                       body.at("fields"), *source);
                   send_json(res, {{"record", record_to_json(record)}});
                 });
               });

  server_.Get(R"(/dmms/resolve/(.+))", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      auto record =
          registry_.resolver().resolve(parse_pid(std::string(req.matches[1])));
      nlohmann::json out = {
          {"pid", record.pid.render()},
          {"hosting_platform_id", record.hosting_platform_id},
          {"platform_endpoint", record.platform_endpoint}};
      if (record.primary_platform_pid) {
        out["primary_platform_pid"] = record.primary_platform_pid->render();
      }
      send_json(res, out);
    });
  });

  server_.Get("/dmms/records", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    guarded(res, [&] {
      auto page = registry_.query_records(filter_from(req), cursor_from(req),
                                          page_size_from(req), caller_of(req));
      nlohmann::json records = nlohmann::json::array();
      for (const auto& r : page.records) records.push_back(record_to_json(r));
      nlohmann::json out = {{"records", records}};
      if (page.next_cursor) out["next_cursor"] = *page.next_cursor;
      send_json(res, out);
    });
  });

  server_.Get(R"(/dmms/records/(.+))", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      auto record = registry_.get_record(
          parse_pid(std::string(req.matches[1])), caller_of(req));
      send_json(res, {{"record", record_to_json(record)}});
    });
  });

  server_.Get("/dmms/manifest", [this](const httplib::Request&,
                                       httplib::Response& res) {
    guarded(res,
            [&] { send_json(res, manifest_to_json(registry_.manifest())); });
  });
}

HubServer::HubServer(Hub& hub, FederatedExecutor& federated)
    : hub_(hub), federated_(federated) {
  wire_routes();
}

HubServer::~HubServer() { stop(); }

int HubServer::start(const std::string& host, int port) {
  int bound = bind_server(server_, host, port);
  url_ = "http://" + host + ":" + std::to_string(bound);
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return bound;
}

void HubServer::stop() {
  if (thread_.joinable()) {
    server_.stop();
    thread_.join();
  }
}

void HubServer::attach_notice(const httplib::Request& req,
                              nlohmann::json& body) {
  std::optional<std::string> session;
  if (req.has_header("X-Session-Id")) {
    session = req.get_header_value("X-Session-Id");
  }
  if (auto notice = hub_.notice_for_session(session)) {
    body["usage_collection_notice"] = *notice;
  }
}

void HubServer::wire_routes() {
  // Everything crossing the hub's HTTP boundary lands in the transport
  // log; the data-locality check scans it for hosted-content sentinels.
  if (hub_.tap()) {
    server_.set_logger([this](const httplib::Request& req,
                              const httplib::Response& res) {
      hub_.tap()->record("in", req.method + " " + req.path, req.body);
      hub_.tap()->record("out", req.method + " " + req.path, res.body);
    });
  }

  server_.Get("/hub/search", [this](const httplib::Request& req,
                                    httplib::Response& res) {
    guarded(res, [&] {
      auto page = hub_.search(filter_from(req), cursor_from(req),
                              page_size_from(req), bearer_token(req));
      nlohmann::json results = nlohmann::json::array();
      for (const auto& r : page.results) {
        results.push_back(
            {{"record", record_to_json(r.record)},
             {"availability", std::string(availability_name(r.availability))}});
      }
      nlohmann::json out = {{"results", results}};
      if (page.next_cursor) out["next_cursor"] = *page.next_cursor;
      attach_notice(req, out);
      send_json(res, out);
    });
  });

  server_.Post("/hub/access", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      auto grant = hub_.broker_access(
          bearer_token(req), parse_pid(body.at("mesh_pid").get<std::string>()),
          body.at("aae_id").get<std::string>());
      nlohmann::json out = {
          {"pid", grant.pid},
          {"aae_id", grant.aae_id},
          {"constraints",
           {{"downloadable_out_of_aae",
             grant.constraints.downloadable_out_of_aae},
            {"redistributable", grant.constraints.redistributable}}},
          {"transfer_url", grant.transfer_url}};
      attach_notice(req, out);
      send_json(res, out);
    });
  });

  server_.Post("/hub/harvest", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    guarded(res, [&] {
      nlohmann::json summaries = nlohmann::json::array();
      for (const auto& s : hub_.harvest()) {
        nlohmann::json j = {{"platform_id", s.platform_id},
                            {"listed", s.listed},
                            {"upserts", s.upserts},
                            {"new_records", s.new_records},
                            {"changed", s.changed},
                            {"schema_failures", s.schema_failures}};
        if (s.error) j["error"] = *s.error;
        summaries.push_back(std::move(j));
      }
      nlohmann::json out = {{"summaries", summaries}};
      attach_notice(req, out);
      send_json(res, out);
    });
  });

  server_.Post("/hub/usage/run", [this](const httplib::Request& req,
                                        httplib::Response& res) {
    guarded(res, [&] {
      auto body = req.body.empty() ? nlohmann::json::object()
                                   : nlohmann::json::parse(req.body);
      int64_t start = body.value("period_start", int64_t{0});
      int64_t end = body.value("period_end",
                               std::numeric_limits<int64_t>::max());
      nlohmann::json reports = nlohmann::json::array();
      for (const auto& r : hub_.report_usage(start, end)) {
        reports.push_back(usage_report_to_json(r));
      }
      send_json(res, {{"reports", reports},
                      {"pending", hub_.pending_report_count()}});
    });
  });

  server_.Post("/hub/usage/retry", [this](const httplib::Request&,
                                          httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, {{"delivered", hub_.retry_pending()},
                      {"pending", hub_.pending_report_count()}});
    });
  });

  server_.Post("/federated/workflows", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      WorkflowRequest w;
      w.workflow_id = body.value("workflow_id", std::string());
      w.approved = body.value("approved", false);
      for (const auto& p :
           body.value("target_platforms", nlohmann::json::array())) {
        w.target_platforms.push_back(p.get<std::string>());
      }
      w.computation = body.value("computation", nlohmann::json::object());
      w.submitter = body.value("submitter", std::string());
      auto id = federated_.submit(w, bearer_token(req));
      federated_.execute(id);
      auto out = workflow_result_to_json(federated_.result(id),
                                         federated_.redact_for_submitter(id));
      attach_notice(req, out);
      send_json(res, out);
    });
  });

  server_.Get(R"(/federated/workflows/([^/]+))",
              [this](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  std::string id = req.matches[1];
                  bool reviewer_view =
                      req.get_param_value("view") == "reviewer";
                  bool redact = reviewer_view
                                    ? false
                                    : federated_.redact_for_submitter(id);
                  send_json(res, workflow_result_to_json(federated_.result(id),
                                                         redact));
                });
              });

  server_.Post(R"(/federated/workflows/([^/]+)/review)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto body = nlohmann::json::parse(req.body);
                   auto result = federated_.review(
                       std::string(req.matches[1]),
                       body.at("decision").get<std::string>(),
                       body.value("reviewer", std::string()));
                   send_json(res, workflow_result_to_json(result, false));
                 });
               });
}

}  // namespace meshkit
