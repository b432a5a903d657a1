// SPDX-FileCopyrightText: (c) 2026 The Meshkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// meshkit — single binary driving the demo mesh: serve, register,
// harvest, search, broker access, run federated workflows, return usage
// statistics, and score conformance.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "meshkit/conformance.hpp"
#include "meshkit/errors.hpp"
#include "meshkit/runtime.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw meshkit::MeshError(meshkit::ErrorCode::bad_fixture,
                             "cannot open " + path);
  }
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw meshkit::MeshError(meshkit::ErrorCode::bad_fixture,
                             path + " is not valid JSON");
  }
  return j;
}

struct AuthOptions {
  std::string token;
  std::string auth_node;
  std::string username;
  std::string secret;

  std::optional<std::string> resolve() const {
    if (!token.empty()) return token;
    if (auth_node.empty() || username.empty()) return std::nullopt;
    meshkit::NodeGateway gw("auth", auth_node, nullptr);
    return gw.post_json("/auth/token",
                        {{"username", username}, {"secret", secret}})
        .at("token")
        .get<std::string>();
  }
};

void add_auth_options(CLI::App* cmd, AuthOptions& auth) {
  cmd->add_option("--token", auth.token, "bearer token");
  cmd->add_option("--auth-node", auth.auth_node,
                  "node endpoint to fetch a token from");
  cmd->add_option("--username", auth.username, "username at --auth-node");
  cmd->add_option("--secret", auth.secret, "secret at --auth-node");
}

int cmd_mesh_up(const std::string& scenario_path,
                const std::string& manifest_override, int port_base,
                int duration, bool as_json) {
  auto config = meshkit::ScenarioConfig::load(scenario_path);
  if (!manifest_override.empty()) config.manifest_path = manifest_override;
  meshkit::MeshRuntime runtime(std::move(config));
  runtime.start(port_base);

  auto table = runtime.endpoint_table();
  if (as_json) {
    std::cout << table.dump(2) << "\n";
  } else {
    std::cout << "dmms  " << table.at("dmms").get<std::string>() << "\n"
              << "hub   " << table.at("hub").get<std::string>() << "\n";
    for (const auto& [id, url] : table.at("nodes").items()) {
      std::cout << "node  " << id << "  " << url.get<std::string>() << "\n";
    }
    std::cout << "mesh is up"
              << (duration > 0 ? "" : "; Ctrl-C stops it") << std::endl;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::seconds(duration > 0 ? duration : 0);
  while (!g_stop) {
    if (duration > 0 && std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  runtime.stop();
  return 0;
}

int cmd_register(const std::string& dmms, const std::string& file,
                 bool as_json) {
  meshkit::NodeGateway gw("dmms", dmms, nullptr);
  auto response = gw.post_json("/dmms/register", load_json_file(file));
  if (as_json) {
    std::cout << response.dump(2) << "\n";
  } else {
    std::cout << response.at("mesh_pid").get<std::string>() << "\n";
  }
  return 0;
}

int cmd_harvest(const std::string& hub, bool as_json) {
  meshkit::NodeGateway gw("hub", hub, nullptr);
  auto response = gw.post_json("/hub/harvest", nlohmann::json::object());
  if (as_json) {
    std::cout << response.dump(2) << "\n";
    return 0;
  }
  for (const auto& s : response.at("summaries")) {
    std::cout << s.at("platform_id").get<std::string>()
              << ": listed=" << s.at("listed").get<size_t>()
              << " upserts=" << s.at("upserts").get<size_t>()
              << " new=" << s.at("new_records").get<size_t>()
              << " changed=" << s.at("changed").get<size_t>()
              << " failures=" << s.at("schema_failures").size();
    if (s.contains("error")) {
      std::cout << " error=" << s.at("error").get<std::string>();
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_search(const std::string& hub, const std::string& q,
               const std::string& type, const std::string& platform,
               const std::string& cursor, int page_size,
               const std::string& session, const AuthOptions& auth,
               bool as_json) {
  std::string path = "/hub/search?page_size=" + std::to_string(page_size);
  auto add = [&path](const std::string& key, const std::string& value) {
    if (!value.empty()) path += "&" + key + "=" + value;
  };
  add("q", q);
  add("type", type);
  add("platform", platform);
  add("cursor", cursor);
  std::map<std::string, std::string> extra;
  if (!session.empty()) extra["X-Session-Id"] = session;

  meshkit::NodeGateway gw("hub", hub, nullptr);
  auto response = gw.get_json(path, auth.resolve(), extra);
  if (as_json) {
    std::cout << response.dump(2) << "\n";
    return 0;
  }
  if (response.contains("usage_collection_notice")) {
    std::cout << "[notice] "
              << response.at("usage_collection_notice").get<std::string>()
              << "\n";
  }
  for (const auto& r : response.at("results")) {
    const auto& record = r.at("record");
    std::cout << r.at("availability").get<std::string>() << "  "
              << record.at("mesh_pid").get<std::string>() << "  "
              << record.at("metadata").value("title", std::string()) << "\n";
  }
  if (response.contains("next_cursor")) {
    std::cout << "next_cursor " << response.at("next_cursor").get<std::string>()
              << "\n";
  }
  return 0;
}

int cmd_access(const std::string& hub, const std::string& pid,
               const std::string& aae, const std::string& session,
               const AuthOptions& auth, bool as_json) {
  std::map<std::string, std::string> extra;
  if (!session.empty()) extra["X-Session-Id"] = session;
  meshkit::NodeGateway gw("hub", hub, nullptr);
  auto response = gw.post_json(
      "/hub/access", {{"mesh_pid", pid}, {"aae_id", aae}}, auth.resolve(),
      extra);
  if (as_json) {
    std::cout << response.dump(2) << "\n";
    return 0;
  }
  if (response.contains("usage_collection_notice")) {
    std::cout << "[notice] "
              << response.at("usage_collection_notice").get<std::string>()
              << "\n";
  }
  std::cout << "transfer granted: " << response.at("pid").get<std::string>()
            << " -> " << response.at("aae_id").get<std::string>() << " at "
            << response.at("transfer_url").get<std::string>() << "\n";
  return 0;
}

int cmd_usage_report(const std::string& hub, int64_t start, int64_t end,
                     bool retry, bool as_json) {
  meshkit::NodeGateway gw("hub", hub, nullptr);
  nlohmann::json body = nlohmann::json::object();
  if (start >= 0) body["period_start"] = start;
  if (end >= 0) body["period_end"] = end;
  auto response = gw.post_json("/hub/usage/run", body);
  if (retry) {
    auto retried = gw.post_json("/hub/usage/retry", nlohmann::json::object());
    response["retry"] = retried;
  }
  if (as_json) {
    std::cout << response.dump(2) << "\n";
    return 0;
  }
  for (const auto& report : response.at("reports")) {
    std::cout << report.at("platform_id").get<std::string>() << ":\n";
    for (const auto& entry : report.at("entries")) {
      std::cout << "  " << entry.at("mesh_pid").get<std::string>()
                << " count=" << entry.at("count").get<uint64_t>()
                << " identities=[";
      bool first = true;
      for (const auto& id : entry.at("identities")) {
        std::cout << (first ? "" : ",") << id.get<std::string>();
        first = false;
      }
      std::cout << "]\n";
    }
  }
  std::cout << "pending " << response.at("pending").get<size_t>() << "\n";
  return 0;
}

int cmd_federate(const std::string& hub, const std::string& file,
                 const std::string& status_id, const std::string& review,
                 const std::string& workflow, const std::string& reviewer,
                 const AuthOptions& auth, bool as_json) {
  meshkit::NodeGateway gw("hub", hub, nullptr);
  nlohmann::json response;
  if (!review.empty()) {
    response = gw.post_json(
        "/federated/workflows/" + workflow + "/review",
        {{"decision", review}, {"reviewer", reviewer}});
  } else if (!status_id.empty()) {
    response = gw.get_json("/federated/workflows/" + status_id);
  } else {
    response = gw.post_json("/federated/workflows", load_json_file(file),
                            auth.resolve());
  }
  if (as_json) {
    std::cout << response.dump(2) << "\n";
    return 0;
  }
  std::cout << response.at("workflow_id").get<std::string>() << " "
            << response.at("review_status").get<std::string>() << "\n";
  for (const auto& [platform, slot] : response.at("per_platform").items()) {
    std::cout << "  " << platform << " " << slot.at("status").get<std::string>();
    if (slot.contains("value") && !slot.at("value").is_null()) {
      std::cout << " value=" << slot.at("value").dump();
    } else if (slot.value("redacted", false)) {
      std::cout << " value=(redacted)";
    }
    if (slot.contains("detail")) {
      std::cout << " detail=" << slot.at("detail").get<std::string>();
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_conformance(const std::string& node, const std::string& mesh,
                    const std::string& probe_path, const std::string& format) {
  meshkit::ConformanceReport report;
  if (!node.empty()) {
    meshkit::ProbeConfig probe;
    if (!probe_path.empty()) {
      auto j = load_json_file(probe_path);
      // accept either a bare probe object or a mesh descriptor wrapping one
      probe = meshkit::ProbeConfig::from_json(j.contains("probe") ? j.at("probe") : j);
    }
    report = meshkit::check_node(node, probe);
  } else {
    report = meshkit::check_mesh(meshkit::MeshDescriptor::load(mesh));
  }
  std::cout << meshkit::render_report(report, format);
  return meshkit::exit_code_for(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshkit: a desk-scale ten-pillar data mesh"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  auto* mesh = app.add_subcommand("mesh", "mesh lifecycle");
  mesh->require_subcommand(1);
  auto* up = mesh->add_subcommand("up", "serve the demo mesh");
  std::string scenario_path = "fixtures/scenario.json";
  std::string manifest_override;
  int port_base = 0;
  int duration = 0;
  up->add_option("--scenario", scenario_path, "scenario config")
      ->capture_default_str();
  up->add_option("--manifest", manifest_override,
                 "override the scenario's manifest path")
      ->envname("MESHKIT_MANIFEST");
  up->add_option("--port-base", port_base,
                 "first port; 0 lets the OS choose all ports")
      ->envname("MESHKIT_PORT_BASE");
  up->add_option("--duration", duration,
                 "stop after N seconds instead of waiting for SIGINT");

  auto* reg = app.add_subcommand("register", "register an object with the DMMS");
  std::string dmms_url, register_file;
  reg->add_option("--dmms", dmms_url, "DMMS endpoint")->required();
  reg->add_option("--file", register_file, "registration request JSON")
      ->required();

  std::string hub_url;
  auto* harvest = app.add_subcommand("harvest", "harvest node metadata");
  harvest->add_option("--hub", hub_url, "hub endpoint")->required();

  auto* search = app.add_subcommand("search", "search the mesh");
  std::string q, type, platform, cursor, session;
  int page_size = 50;
  AuthOptions search_auth;
  search->add_option("--hub", hub_url, "hub endpoint")->required();
  search->add_option("--q", q, "text query over title+description");
  search->add_option("--type", type, "object type filter");
  search->add_option("--platform", platform, "hosting platform filter");
  search->add_option("--cursor", cursor, "page cursor");
  search->add_option("--page-size", page_size, "page size")
      ->capture_default_str();
  search->add_option("--session", session, "session id (X-Session-Id)");
  add_auth_options(search, search_auth);

  auto* access = app.add_subcommand("access", "broker an AAE transfer");
  std::string access_pid, access_aae;
  AuthOptions access_auth;
  access->add_option("--hub", hub_url, "hub endpoint")->required();
  access->add_option("--pid", access_pid, "mesh PID")->required();
  access->add_option("--aae", access_aae, "authorized analysis environment id")
      ->required();
  access->add_option("--session", session, "session id (X-Session-Id)");
  add_auth_options(access, access_auth);

  auto* usage = app.add_subcommand("usage-report",
                                   "aggregate and deliver usage statistics");
  int64_t period_start = -1, period_end = -1;
  bool retry = false;
  usage->add_option("--hub", hub_url, "hub endpoint")->required();
  usage->add_option("--start", period_start, "period start (unix seconds)");
  usage->add_option("--end", period_end, "period end (unix seconds)");
  usage->add_flag("--retry", retry, "retry queued deliveries afterwards");

  auto* federate = app.add_subcommand("federate", "submit or manage workflows");
  std::string workflow_file, status_id, review_decision, workflow_id, reviewer;
  AuthOptions federate_auth;
  federate->add_option("--hub", hub_url, "hub endpoint")->required();
  federate->add_option("--file", workflow_file, "workflow request JSON");
  federate->add_option("--status", status_id, "show a workflow's state");
  federate->add_option("--review", review_decision,
                       "review decision: released or withheld");
  federate->add_option("--workflow", workflow_id, "workflow id for --review");
  federate->add_option("--reviewer", reviewer, "reviewer name for --review");

  add_auth_options(federate, federate_auth);

  auto* conformance =
      app.add_subcommand("conformance", "score a node or mesh on the pillars");
  std::string conf_node, conf_mesh, probe_path, format = "text";
  conformance->add_option("--node", conf_node, "node endpoint (pillars 1-5)");
  conformance->add_option("--mesh", conf_mesh,
                          "mesh descriptor JSON (pillars 6-10)");
  conformance->add_option("--probe", probe_path, "probe anchors JSON");
  conformance->add_option("--format", format, "text or json")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (up->parsed()) {
      return cmd_mesh_up(scenario_path, manifest_override, port_base, duration,
                         as_json);
    }
    if (reg->parsed()) return cmd_register(dmms_url, register_file, as_json);
    if (harvest->parsed()) return cmd_harvest(hub_url, as_json);
    if (search->parsed()) {
      return cmd_search(hub_url, q, type, platform, cursor, page_size, session,
                        search_auth, as_json);
    }
    if (access->parsed()) {
      return cmd_access(hub_url, access_pid, access_aae, session, access_auth,
                        as_json);
    }
    if (usage->parsed()) {
      return cmd_usage_report(hub_url, period_start, period_end, retry,
                              as_json);
    }
    if (federate->parsed()) {
      return cmd_federate(hub_url, workflow_file, status_id, review_decision,
                          workflow_id, reviewer, federate_auth, as_json);
    }
    if (conformance->parsed()) {
      if (conf_node.empty() == conf_mesh.empty()) {
        std::cerr << "exactly one of --node or --mesh is required\n";
        return 1;
      }
      return cmd_conformance(conf_node, conf_mesh, probe_path, format);
    }
  } catch (const meshkit::MeshError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
