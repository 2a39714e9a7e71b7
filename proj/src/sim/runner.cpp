#include "labbook/sim/runner.hpp"

#include <thread>

#include <httplib.h>

#include "labbook/error.hpp"
#include "labbook/protocol/messages.hpp"

namespace labbook::sim {

using protocol::Frame;

ToolClient::ToolClient(const std::string& host, std::uint16_t port) : socket_(net::connect_tcp(host, port)) {}

void ToolClient::note(std::string line) {
  if (on_line) on_line(line);
  transcript_.push_back(std::move(line));
}

std::int64_t ToolClient::send(const std::string& type, Json payload) {
  auto line = protocol::encode_frame(Frame{type, ++seq_, std::move(payload)});
  socket_.write_all(line);
  line.pop_back();
  note("> " + line);
  return seq_;
}

Frame ToolClient::receive(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string buf(64 * 1024, '\0');
  for (;;) {
    if (auto line = reader_.next_line()) {
      note("< " + *line);
      auto decoded = protocol::decode_frame(*line);
      if (auto* err = std::get_if<protocol::FrameError>(&decoded)) {
        throw Error(Errc::io_error, "server sent a malformed frame: " + err->message);
      }
      return std::get<Frame>(decoded);
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !socket_.wait_readable(left)) throw Error(Errc::io_error, "timed out waiting for server");
    auto n = socket_.read_some(buf.data(), buf.size());
    if (n == 0) throw Error(Errc::io_error, "server closed the connection");
    reader_.feed(std::string_view(buf.data(), n));
  }
}

void ToolClient::wait_closed(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[4096];
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !socket_.wait_readable(left)) return;
    if (socket_.read_some(buf, sizeof buf) == 0) return;
  }
}

void ToolClient::close() { socket_.close(); }

namespace {

struct Runner {
  const RunOptions& opt;
  ToolClient client;
  RunResult result;
  std::vector<std::string> added_ids; // m1, m2, ...
  bool bound = false;

  Runner(const RunOptions& o) : opt(o), client(o.host, o.tool_port) {
    client.on_line = o.on_line;
    result.client = ClientState(o.scene);
  }

  // Handles unsolicited frames; returns the reply to `seq`.
  Frame await_reply(std::int64_t seq) {
    for (;;) {
      auto f = client.receive(opt.reply_timeout);
      auto rt = f.payload.find("reply_to");
      if (rt != f.payload.end() && rt->is_number_integer() && rt->get<std::int64_t>() == seq) return f;
      handle_push(f);
    }
  }

  void handle_push(const Frame& f) {
    if (f.type == "restore" || f.type == "redo_apply") {
      result.client.apply_snapshot_wire(f.payload.at("snapshot"));
    }
  }

  [[noreturn]] void refuse(const Step& step, const std::string& msg) {
    throw Error(Errc::script_error, "line " + std::to_string(step.line) + ": " + msg);
  }

  void bind(const Step& step) {
    if (bound) return;
    auto try_bind = [&](bool create) {
      auto seq = client.send(create ? "create_repo" : "load_repo", {{"name", opt.repo}});
      return await_reply(seq);
    };
    Frame reply;
    if (opt.mode == RepoMode::create) {
      reply = try_bind(true);
    } else {
      reply = try_bind(false);
      if (opt.mode == RepoMode::automatic && reply.type == "error" && reply.payload.value("code", "") == "NOT_FOUND") {
        reply = try_bind(true);
      }
    }
    if (reply.type == "error") {
      refuse(step, "cannot bind repository '" + opt.repo + "': " + reply.payload.value("code", "") + ": " +
                       reply.payload.value("message", ""));
    }
    if (reply.type == "restore") {
      result.client.apply_snapshot_wire(reply.payload.at("snapshot"));
      result.commits.push_back(reply.payload.at("commit").get<std::string>());
    } else {
      result.commits.push_back(reply.payload.at("commit_id").get<std::string>());
    }
    bound = true;
  }

  std::string commit_ref(const Step& step) {
    const auto& ref = step.text;
    if (ref == "root") return "root";
    if (ref.size() > 1 && ref[0] == 'c' && ref.find_first_not_of("0123456789", 1) == std::string::npos) {
      auto n = std::stoul(ref.substr(1));
      if (n >= result.commits.size()) refuse(step, "commit reference " + ref + " is not known yet");
      return result.commits[n];
    }
    return ref;
  }

  std::string measurement_ref(const Step& step) {
    const auto& ref = step.text;
    if (ref.size() > 1 && ref[0] == 'm' && ref.find_first_not_of("0123456789", 1) == std::string::npos) {
      auto n = std::stoul(ref.substr(1));
      if (n == 0 || n > added_ids.size()) refuse(step, "measurement reference " + ref + " is not known yet");
      return added_ids[n - 1];
    }
    return ref;
  }

  static vftsim::Point3 pt(const std::vector<double>& v, std::size_t at) { return {v[at], v[at + 1], v[at + 2]}; }

  void send_event(const Step& step, const session::InteractionEvent& event, bool adds) {
    bool bookmark = event.action == session::Action::bookmark;
    auto seq = client.send(bookmark ? "view_bookmark" : "event", protocol::event_to_wire(event));
    auto reply = await_reply(seq);
    if (reply.type != "committed") {
      result.client.on_rejected();
      refuse(step, "server refused " + std::string(verb_name(step.verb)) + ": " + reply.payload.value("code", "") +
                       ": " + reply.payload.value("message", ""));
    }
    result.client.on_committed(reply.payload);
    ++result.committed_acks;
    result.commits.push_back(reply.payload.at("commit_id").get<std::string>());
    if (adds) added_ids.push_back(reply.payload.value("measurement_id", ""));
  }

  void restore(const Step& step) {
    auto target = commit_ref(step);
    if (target == "root") {
      // The root is the first commit of main's history, which the API lists last.
      httplib::Client http(opt.host, opt.http_port);
      auto res = http.Get("/api/v1/graph");
      if (!res || res->status != 200) refuse(step, "cannot read the graph to find the root");
      auto graph = parse_json(res->body, "graph");
      for (const auto& n : graph.at("nodes")) {
        if (n.at("kind") == "session_start") target = n.at("id").get<std::string>();
      }
    }
    httplib::Client http(opt.host, opt.http_port);
    http.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(opt.reply_timeout).count() + 1, 0);
    auto path = "/api/v1/restore/" + target;
    auto res = http.Post(path);
    int status = res ? res->status : 0;
    auto line = "# POST " + path + " -> " + std::to_string(status);
    if (client.on_line) client.on_line(line);
    client.transcript().push_back(line);
    if (status != 200) refuse(step, "restore " + step.text + " failed with HTTP " + std::to_string(status));
    for (;;) {
      auto f = client.receive(opt.reply_timeout);
      if (f.type == "restore") {
        result.client.apply_snapshot_wire(f.payload.at("snapshot"));
        break;
      }
      handle_push(f);
    }
  }

  void run_step(const Step& step) {
    if (step.verb == Verb::sleep) {
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(step.numbers[0])));
      return;
    }
    if (step.verb == Verb::camera) {
      const auto& v = step.numbers;
      result.client.set_camera({{v[0], v[1], v[2]}, {v[3], v[4], v[5], v[6]}});
      return;
    }
    bind(step);
    auto& cs = result.client;
    try {
      switch (step.verb) {
      case Verb::marker:
        send_event(step, cs.place_marker(pt(step.numbers, 0), step.text), true);
        break;
      case Verb::distance:
        send_event(step, cs.place_distance(pt(step.numbers, 0), pt(step.numbers, 3)), true);
        break;
      case Verb::strikedip:
        send_event(step, cs.place_strike_dip(pt(step.numbers, 0), pt(step.numbers, 3), pt(step.numbers, 6)), true);
        break;
      case Verb::remove:
        send_event(step, cs.remove_measurement(measurement_ref(step)), false);
        break;
      case Verb::bookmark:
        send_event(step, cs.bookmark(), false);
        break;
      case Verb::restore:
        restore(step);
        break;
      default:
        break;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::script_error || e.code() == Errc::io_error) throw;
      refuse(step, std::string(code_name(e.code())) + ": " + e.what());
    }
  }
};

} // namespace

RunResult run_script(const std::vector<Step>& steps, const RunOptions& options) {
  Runner r(options);
  auto hello = r.client.send("hello", {{"name", options.client_name}, {"scene", options.scene}});
  auto ok = r.await_reply(hello);
  if (ok.type != "hello_ok") {
    throw Error(Errc::io_error, "handshake refused: " + ok.payload.value("message", ""));
  }
  try {
    for (const auto& step : steps) r.run_step(step);
  } catch (const Error& e) {
    if (e.code() != Errc::script_error) throw;
    r.result.failure = e.what();
  }
  try {
    r.client.send("bye", Json::object());
    r.client.wait_closed(std::chrono::seconds(5));
  } catch (const Error&) {
  }
  r.client.close();
  r.result.transcript = std::move(r.client.transcript());
  return std::move(r.result);
}

} // namespace labbook::sim
