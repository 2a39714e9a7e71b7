#include "demo.hpp"

#include <cstdlib>
#include <iostream>

#include <httplib.h>

#include "labbook/encoding.hpp"
#include "labbook/error.hpp"
#include "labbook/protocol/server.hpp"
#include "labbook/provstore/repository.hpp"
#include "labbook/session/mindmap.hpp"
#include "labbook/sim/runner.hpp"

namespace labbook::cli {

const char* const kDemoScript = R"(# built-in survey of the ramp scene
camera 12 -8 6 1 0 0 0
marker 2 1 0.5 vent rim
marker 4 3 1 lava channel
distance 2 1 0.5 4 3 1
strikedip 0 0 0 10 0 0 0 10 5.7735
bookmark
remove m1
restore c3
marker 6 2 0.8 collapse pit
bookmark
)";

namespace {

constexpr const char* kRepoName = "demo";

std::filesystem::path make_temp_dir() {
  auto pattern = (std::filesystem::temp_directory_path() / "labbook-demo-XXXXXX").string();
  if (!::mkdtemp(pattern.data())) throw Error(Errc::io_error, "cannot create a temporary directory");
  return pattern;
}

class Api {
public:
  Api(const std::string& host, std::uint16_t port) : client_(host, port) {
    client_.set_read_timeout(30, 0);
  }

  std::string call(const std::string& method, const std::string& path, const Json& body = nullptr) {
    httplib::Result r;
    auto text = body.is_null() ? std::string() : compact_dump(body);
    if (method == "GET") r = client_.Get(path);
    else if (method == "PUT") r = client_.Put(path, text, "application/json");
    else r = client_.Post(path, text, "application/json");
    if (!r) throw Error(Errc::io_error, method + " " + path + ": " + httplib::to_string(r.error()));
    if (r->status / 100 != 2) {
      throw Error(Errc::io_error, method + " " + path + " -> " + std::to_string(r->status) + ": " + r->body);
    }
    return r->body;
  }

  Json json(const std::string& method, const std::string& path, const Json& body = nullptr) {
    return Json::parse(call(method, path, body));
  }

private:
  httplib::Client client_;
};

} // namespace

DemoReport run_demo(const DemoOptions& options) {
  const bool temp = !options.work_dir;
  const auto root = temp ? make_temp_dir() : *options.work_dir;
  struct Cleanup {
    std::filesystem::path dir;
    bool active;
    ~Cleanup() {
      std::error_code ec;
      if (active) std::filesystem::remove_all(dir, ec);
    }
  } cleanup{root, temp};

  protocol::Config config = options.config;
  config.repo_root = root;
  config.tool_port = 0;
  config.http_port = 0;
  if (std::filesystem::exists(root / kRepoName)) {
    throw Error(Errc::already_exists, "demo repository " + (root / kRepoName).string() + " already exists");
  }

  DemoReport report;
  {
    protocol::Server server(config);
    server.start();
    struct Stop {
      protocol::Server& s;
      ~Stop() { s.stop(); }
    } stop{server};

    sim::RunOptions run;
    run.host = "127.0.0.1";
    run.tool_port = server.tool_port();
    run.http_port = server.http_port();
    run.repo = kRepoName;
    run.mode = sim::RepoMode::create;
    run.client_name = "labbook-demo";
    if (options.echo_transcript) run.on_line = [](const std::string& line) { std::cout << line << '\n'; };
    auto result = sim::run_script(sim::parse_script(kDemoScript, "demo"), run);
    if (result.failure) throw Error(Errc::script_error, "demo script: " + *result.failure);
    const auto& c = result.commits;

    Api api("127.0.0.1", server.http_port());
    api.call("POST", "/api/v1/commits/" + c[1] + "/annotations",
             {{"author", "demo"}, {"text", "vent rim, sampled twice"}});
    api.call("POST", "/api/v1/commits/" + c[4] + "/annotations",
             {{"author", "demo"}, {"text", "dip steeper than the ramp ✓"}});

    session::MindMap map;
    map.nodes.push_back({"s1", session::NodeKind::state, provstore::ObjectId::from_hex(c[1]), 0, 0, "vent"});
    map.nodes.push_back({"s2", session::NodeKind::state, provstore::ObjectId::from_hex(c[4]), 200, 0, "slope"});
    map.nodes.push_back({"h1", session::NodeKind::label, std::nullopt, 100, -120, "collapse hypothesis"});
    map.edges.push_back({"h1", "s1", "supports"});
    map.edges.push_back({"h1", "s2", "questions"});
    api.call("PUT", "/api/v1/mindmap", session::mindmap_to_json(map));
    api.call("PUT", "/api/v1/notes", {{"text", "Ramp survey.\nRim and channel measured; pit added on a branch.\n"}});
    api.call("POST", "/api/v1/redo/" + c[3]);

    auto graph = api.json("GET", "/api/v1/graph");
    report.commits = graph["nodes"].size();
    report.branches = graph["refs"].size();

    auto bundle = api.call("POST", "/api/v1/export");
    provstore::write_file_atomic(options.bundle, bundle);
    report.bundle_bytes = bundle.size();
    report.bundle_sha1 = to_hex(sha1(bundle));
  }
  report.metrics = analysis::repo_metrics(root / kRepoName);
  return report;
}

} // namespace labbook::cli
