// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "meshkit/node_server.hpp"

#include "meshkit/http_util.hpp"

namespace meshkit {

using http::bearer_token;
using http::guarded;
using http::send_json;

NodeServer::NodeServer(PlatformNode& node) : node_(node) { wire_routes(); }

NodeServer::~NodeServer() { stop(); }

int NodeServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_.bind_to_any_port(host);
    if (bound <= 0) {
      throw MeshError(ErrorCode::port_in_use, "cannot bind " + host);
    }
  } else if (!server_.bind_to_port(host, port)) {
    throw MeshError(ErrorCode::port_in_use,
                    host + ":" + std::to_string(port) + " is taken");
  }
  url_ = "http://" + host + ":" + std::to_string(bound);
  node_.set_base_url(url_);
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return bound;
}

void NodeServer::stop() {
  if (thread_.joinable()) {
    server_.stop();
    thread_.join();
  }
}

void NodeServer::wire_routes() {
  server_.Post("/auth/token", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      auto token = node_.authenticate(body.at("username").get<std::string>(),
                                      body.at("secret").get<std::string>());
      send_json(res, {{"token", token}});
    });
  });

  server_.Get("/objects", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::string> cursor;
      if (req.has_param("cursor")) cursor = req.get_param_value("cursor");
      size_t limit = 100;
      if (req.has_param("limit")) {
        limit = std::stoul(req.get_param_value("limit"));
      }
      auto page = node_.list_objects(cursor, limit);
      nlohmann::json out = {{"pids", page.pids}};
      if (page.next_cursor) out["next_cursor"] = *page.next_cursor;
      send_json(res, out);
    });
  });

  server_.Get(R"(/objects/(.+)/metadata)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
    guarded(res, [&] {
      if (node_.config().faults.drop_metadata_endpoint) {
        send_json(res, {{"error", {{"code", "NotFound"}, {"message", "no such endpoint"}}}}, 404);
        return;
      }
      auto [metadata, links] = node_.get_metadata(req.matches[1]);
      nlohmann::json link_array = nlohmann::json::array();
      for (const auto& l : links) {
        link_array.push_back({{"rel", l.rel}, {"href", l.href}});
      }
      send_json(res, {{"metadata", metadata}, {"links", link_array}});
    });
  });

  server_.Get(R"(/objects/(.+)/access)", [this](const httplib::Request& req,
                                                httplib::Response& res) {
    guarded(res, [&] {
      auto descriptor = node_.get_data(bearer_token(req), req.matches[1]);
      send_json(res,
                {{"id", descriptor.id},
                 {"checksums", nlohmann::json::array(
                                   {{{"type", "sha-256"},
                                     {"checksum", descriptor.checksum}}})},
                 {"size", descriptor.size},
                 {"access_methods",
                  nlohmann::json::array(
                      {{{"type", "https"},
                        {"access_url", {{"url", descriptor.access_url}}}}})}});
    });
  });

  server_.Get(R"(/objects/(.+)/data)", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    guarded(res, [&] {
      auto content = node_.read_content(bearer_token(req), req.matches[1]);
      res.status = 200;
      res.set_content(content, "application/octet-stream");
    });
  });

  server_.Post(R"(/objects/(.+)/transfer)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
    guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      auto grant = node_.transfer_to_aae(
          req.matches[1], body.at("aae_id").get<std::string>(),
          bearer_token(req));
      send_json(res,
                {{"pid", grant.pid},
                 {"aae_id", grant.aae_id},
                 {"constraints",
                  {{"downloadable_out_of_aae",
                    grant.constraints.downloadable_out_of_aae},
                   {"redistributable", grant.constraints.redistributable}}},
                 {"transfer_url", grant.transfer_url}});
    });
  });

  server_.Post("/usage/reports", [this](const httplib::Request& req,
                                        httplib::Response& res) {
    guarded(res, [&] {
      node_.receive_usage_report(nlohmann::json::parse(req.body));
      send_json(res, {{"status", "accepted"}});
    });
  });

  server_.Get("/usage/reports", [this](const httplib::Request&,
                                       httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, {{"reports", node_.received_usage_reports()}});
    });
  });

  server_.Post("/federated/execute", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      std::optional<std::string> token = bearer_token(req);
      if (body.contains("token") && body.at("token").is_string()) {
        token = body.at("token").get<std::string>();
      }
      send_json(res, node_.execute_computation(body.at("computation"), token));
    });
  });
}

}  // namespace meshkit
