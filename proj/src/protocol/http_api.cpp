#include "labbook/protocol/http_api.hpp"

#include <thread>

#include <httplib.h>

#include "labbook/error.hpp"
#include "labbook/provstore/bundle.hpp"
#include "labbook/protocol/messages.hpp"
#include "labbook/vftsim/measurement_json.hpp"

namespace labbook::protocol {

using provstore::ObjectId;

int http_status_for(Errc code) noexcept {
  switch (code) {
  case Errc::not_found: return 404;
  case Errc::invalid_input:
  case Errc::invalid_name:
  case Errc::degenerate_geometry:
  case Errc::invalid_snapshot:
    return 400;
  case Errc::already_exists:
  case Errc::busy:
  case Errc::inapplicable:
  case Errc::no_client:
  case Errc::no_session:
    return 409;
  default:
    return 500;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(compact_dump(body) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", {{"code", std::string(code)}, {"message", message}}}});
}

// Wraps a handler so domain errors become JSON error responses.
httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, http_status_for(e.code()), code_name(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "INTERNAL", e.what());
    }
  };
}

ObjectId commit_id_param(const httplib::Request& req) {
  auto id = ObjectId::parse(req.matches[1].str());
  if (!id) throw Error(Errc::not_found, "no commit " + req.matches[1].str());
  return *id;
}

Json body_json(const httplib::Request& req) { return parse_json(req.body, "request body"); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string screenshot_url(const ObjectId& id) { return "/api/v1/commits/" + id.hex() + "/screenshot"; }

Json annotation_json(const provstore::Annotation& a) {
  return {{"commit", a.commit.hex()},
          {"author", a.author},
          {"timestamp", format_rfc3339(a.timestamp)},
          {"text", a.text}};
}

Json graph_json(session::Session& s, const std::string& repo_name) {
  auto& repo = s.repo();
  auto annotations = repo.all_annotations();
  Json nodes = Json::array();
  Json edges = Json::array();
  for (const auto& c : repo.log_all()) {
    auto it = annotations.find(c.id);
    Json parents = Json::array();
    for (const auto& p : c.parents) {
      parents.push_back(p.hex());
      edges.push_back({{"from", c.id.hex()}, {"to", p.hex()}});
    }
    nodes.push_back({{"id", c.id.hex()},
                     {"kind", std::string(provstore::kind_name(c.kind))},
                     {"message", first_line(c.message)},
                     {"author", c.author},
                     {"timestamp", format_rfc3339(c.timestamp)},
                     {"parents", parents},
                     {"annotation_count", it == annotations.end() ? 0 : it->second.size()},
                     {"screenshot_url", screenshot_url(c.id)}});
  }
  Json refs = Json::object();
  for (const auto& [name, id] : repo.list_refs()) refs[name] = id.hex();
  return {{"repo", repo_name}, {"nodes", nodes}, {"edges", edges}, {"refs", refs}, {"head", head_to_json(s.head())}};
}

Json commit_json(session::Session& s, const ObjectId& id) {
  auto& repo = s.repo();
  if (!repo.is_commit(id)) throw Error(Errc::not_found, "no commit " + id.hex());
  auto c = repo.get_commit(id);
  auto snap = session::read_snapshot(repo, c.tree);
  Json parents = Json::array();
  for (const auto& p : c.parents) parents.push_back(p.hex());
  Json annotations = Json::array();
  for (const auto& a : repo.annotations(id)) annotations.push_back(annotation_json(a));
  return {{"id", id.hex()},
          {"kind", std::string(provstore::kind_name(c.kind))},
          {"message", c.message},
          {"author", c.author},
          {"timestamp", format_rfc3339(c.timestamp)},
          {"parents", parents},
          {"tree", c.tree.hex()},
          {"branches", repo.branches_at(id)},
          {"annotations", annotations},
          {"snapshot",
           {{"measurements", vftsim::measurements_to_json(snap.measurements)},
            {"camera", vftsim::camera_to_json(snap.camera)},
            {"mindmap", session::mindmap_to_json(snap.mindmap)},
            {"notes", snap.notes},
            {"has_screenshot", !snap.screenshot.empty()}}},
          {"screenshot_url", screenshot_url(id)}};
}

Json record_json(const session::RecordResult& r, const provstore::HeadState& head) {
  return committed_payload(r, head);
}

} // namespace

struct HttpApi::Impl {
  explicit Impl(ServerContext& c) : context(c) {}

  ServerContext& context;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  void routes();
};

void HttpApi::Impl::routes() {
  auto& ctx = context;
  server.Get("/api/v1/graph", guarded([&](const httplib::Request&, httplib::Response& res) {
    auto name = ctx.repo_name().value_or("");
    send_json(res, 200, ctx.with_session([&](session::Session& s) { return graph_json(s, name); }));
  }));

  server.Get(R"(/api/v1/commits/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto id = commit_id_param(req);
    send_json(res, 200, ctx.with_session([&](session::Session& s) { return commit_json(s, id); }));
  }));

  server.Get(R"(/api/v1/commits/([^/]+)/screenshot)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               auto id = commit_id_param(req);
               auto png = ctx.with_session([&](session::Session& s) {
                 if (!s.repo().is_commit(id)) throw Error(Errc::not_found, "no commit " + id.hex());
                 return session::read_snapshot(s.repo(), s.repo().get_commit(id).tree).screenshot;
               });
               if (png.empty()) throw Error(Errc::not_found, "commit " + id.hex() + " has no screenshot");
               res.set_content(png, "image/png");
             }));

  server.Post(R"(/api/v1/commits/([^/]+)/annotations)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                auto id = commit_id_param(req);
                auto body = body_json(req);
                if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
                  throw Error(Errc::invalid_input, "body needs a text string");
                }
                std::string author = "anonymous";
                if (body.contains("author")) {
                  if (!body["author"].is_string()) throw Error(Errc::invalid_input, "author must be a string");
                  author = body["author"].get<std::string>();
                }
                auto text = body["text"].get<std::string>();
                auto a = ctx.with_session([&](session::Session& s) { return s.annotate_state(id, text, author); });
                ctx.notify_graph_changed();
                send_json(res, 201, annotation_json(a));
              }));

  server.Post(R"(/api/v1/restore/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto id = commit_id_param(req);
    auto out = ctx.with_session_and_client([&](session::Session& s, ClientLink* client) {
      if (!s.repo().is_commit(id)) throw Error(Errc::not_found, "no commit " + id.hex());
      if (!client) throw Error(Errc::no_client, "no visualization client is connected");
      auto instr = s.restore(id);
      client->push("restore", {{"commit", id.hex()},
                               {"head", head_to_json(instr.head)},
                               {"snapshot", snapshot_to_wire(instr.snapshot)},
                               {"reason", "restore"}});
      return Json{{"commit", id.hex()}, {"head", head_to_json(instr.head)}};
    });
    ctx.notify_graph_changed();
    send_json(res, 200, out);
  }));

  server.Post(R"(/api/v1/redo/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto id = commit_id_param(req);
    auto out = ctx.with_session_and_client([&](session::Session& s, ClientLink* client) {
      auto r = s.redo(id);
      auto payload = record_json(r, s.head());
      if (client) {
        Json push = payload;
        push["snapshot"] = snapshot_to_wire(s.current());
        client->push("redo_apply", std::move(push));
      }
      return payload;
    });
    ctx.notify_graph_changed();
    send_json(res, 201, out);
  }));

  server.Get("/api/v1/mindmap", guarded([&](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200,
              ctx.with_session([&](session::Session& s) { return session::mindmap_to_json(s.current().mindmap); }));
  }));

  server.Put("/api/v1/mindmap", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto map = session::mindmap_from_json(body_json(req));
    auto out = ctx.with_session([&](session::Session& s) {
      auto r = s.save_mindmap(map);
      if (!r) return Json{{"committed", false}};
      auto j = record_json(*r, s.head());
      j["committed"] = true;
      return j;
    });
    if (out["committed"] == true) ctx.notify_graph_changed();
    send_json(res, 200, out);
  }));

  server.Get("/api/v1/notes", guarded([&](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, ctx.with_session([&](session::Session& s) { return Json{{"text", s.current().notes}}; }));
  }));

  server.Put("/api/v1/notes", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto body = body_json(req);
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      throw Error(Errc::invalid_input, "body needs a text string");
    }
    auto text = body["text"].get<std::string>();
    auto out = ctx.with_session([&](session::Session& s) {
      auto r = s.save_notes(text);
      if (!r) return Json{{"committed", false}};
      auto j = record_json(*r, s.head());
      j["committed"] = true;
      return j;
    });
    if (out["committed"] == true) ctx.notify_graph_changed();
    send_json(res, 200, out);
  }));

  server.Post("/api/v1/export", guarded([&](const httplib::Request&, httplib::Response& res) {
    auto name = ctx.repo_name().value_or("repo");
    auto bytes = ctx.with_session([&](session::Session& s) { return provstore::export_bundle_bytes(s.repo()); });
    res.set_header("Content-Disposition", "attachment; filename=\"" + name + ".labbook.zip\"");
    res.set_content(bytes, "application/zip");
  }));

  server.Get("/api/v1/events", [&](const httplib::Request&, httplib::Response& res) {
    res.set_header("Cache-Control", "no-cache");
    auto seen = std::make_shared<std::optional<std::uint64_t>>();
    auto idle = std::make_shared<int>(0);
    res.set_chunked_content_provider("text/event-stream", [&ctx, seen, idle](std::size_t, httplib::DataSink& sink) {
      if (ctx.shutting_down()) {
        sink.done();
        return true;
      }
      std::uint64_t version;
      if (!*seen) {
        version = ctx.graph_version();
      } else {
        version = ctx.wait_graph_change(**seen, std::chrono::milliseconds(500));
        if (version == **seen) {
          if (ctx.shutting_down()) {
            sink.done();
            return true;
          }
          if (++*idle % 30 == 0) {
            std::string ping = ": keep-alive\n\n";
            return sink.write(ping.data(), ping.size());
          }
          return sink.is_writable();
        }
      }
      *seen = version;
      *idle = 0;
      auto msg = "event: graph_changed\ndata: " + compact_dump(Json{{"version", version}}) + "\n\n";
      return sink.write(msg.data(), msg.size());
    });
  });

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "NOT_FOUND" : "HTTP_ERROR", "no such endpoint");
    }
  });
}

HttpApi::HttpApi(ServerContext& context) : impl_(std::make_unique<Impl>(context)) { impl_->routes(); }

HttpApi::~HttpApi() { stop(); }

std::uint16_t HttpApi::bind(const std::string& host, std::uint16_t port) {
  int bound_port = port == 0 ? impl_->server.bind_to_any_port(host)
                             : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound_port <= 0) {
    throw Error(Errc::io_error, "cannot bind HTTP API to " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return static_cast<std::uint16_t>(bound_port);
}

void HttpApi::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpApi::stop() {
  if (!impl_) return;
  impl_->context.shutdown();
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace labbook::protocol
