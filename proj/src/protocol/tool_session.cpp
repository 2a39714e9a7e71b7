#include "labbook/protocol/tool_session.hpp"

#include "labbook/error.hpp"
#include "labbook/protocol/messages.hpp"

namespace labbook::protocol {

namespace {

std::string_view event_error_code(Errc code) {
  switch (code) {
  case Errc::invalid_input:
  case Errc::degenerate_geometry:
  case Errc::invalid_snapshot:
    return "BAD_EVENT";
  case Errc::no_session:
    return "NO_REPO";
  default:
    return code_name(code);
  }
}

} // namespace

std::string_view state_name(ConnState state) noexcept {
  switch (state) {
  case ConnState::handshake: return "handshake";
  case ConnState::awaiting_repo: return "awaiting_repo";
  case ConnState::active: return "active";
  case ConnState::closed: return "closed";
  }
  return "unknown";
}

ToolSession::ToolSession(ServerContext& context, FrameSink& sink) : context_(context), sink_(sink) {}

ToolSession::~ToolSession() { context_.release_client(this); }

ConnState ToolSession::state() const {
  std::lock_guard lock(out_mu_);
  return state_;
}

void ToolSession::send(const std::string& type, Json payload) {
  std::lock_guard lock(out_mu_);
  if (state_ == ConnState::closed) return;
  sink_.send_line(encode_frame(Frame{type, ++out_seq_, std::move(payload)}));
}

void ToolSession::push(const std::string& type, Json payload) { send(type, std::move(payload)); }

void ToolSession::send_error(std::string_view code, const std::string& message,
                             std::optional<std::int64_t> reply_to) {
  Json payload = {{"code", std::string(code)}, {"message", message}};
  if (reply_to) payload["reply_to"] = *reply_to;
  send("error", std::move(payload));
}

void ToolSession::close_connection() {
  {
    std::lock_guard lock(out_mu_);
    if (state_ == ConnState::closed) return;
    state_ = ConnState::closed;
  }
  // Released before the peer sees EOF, so it can reconnect at once.
  context_.release_client(this);
  std::lock_guard lock(out_mu_);
  sink_.close();
}

void ToolSession::on_disconnect() { close_connection(); }

void ToolSession::on_oversize() {
  if (closed()) return;
  send_error("FRAME_TOO_LARGE", "frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes", std::nullopt);
  close_connection();
}

void ToolSession::on_line(std::string_view line) {
  if (closed()) return;
  if (line.size() > kMaxFrameBytes) {
    on_oversize();
    return;
  }
  auto decoded = decode_frame(line);
  if (auto* err = std::get_if<FrameError>(&decoded)) {
    send_error(err->code, err->message, std::nullopt);
    if (state() == ConnState::handshake) close_connection();
    return;
  }
  const auto& frame = std::get<Frame>(decoded);
  if (last_in_seq_ && frame.seq <= *last_in_seq_) {
    send_error("BAD_SEQ", "seq " + std::to_string(frame.seq) + " does not increase past " +
                              std::to_string(*last_in_seq_),
               frame.seq);
    if (state() == ConnState::handshake) close_connection();
    return;
  }
  last_in_seq_ = frame.seq;
  try {
    handle(frame);
  } catch (const Error& e) {
    send_error(code_name(e.code()), e.what(), frame.seq);
  } catch (const std::exception& e) {
    send_error("INTERNAL", e.what(), frame.seq);
  }
}

void ToolSession::handle(const Frame& frame) {
  const auto& type = frame.type;
  auto st = state();
  if (st == ConnState::handshake) {
    if (type != "hello") {
      send_error("HANDSHAKE_REQUIRED", "the first frame must be hello", frame.seq);
      close_connection();
      return;
    }
    const auto& p = frame.payload;
    auto name = p.find("name");
    auto scene = p.find("scene");
    if ((name != p.end() && !name->is_string()) || (scene != p.end() && !scene->is_string())) {
      send_error("BAD_FRAME", "hello name and scene must be strings", frame.seq);
      close_connection();
      return;
    }
    if (name != p.end()) client_name_ = name->get<std::string>();
    if (scene != p.end()) scene_ = scene->get<std::string>();
    {
      std::lock_guard lock(out_mu_);
      state_ = ConnState::awaiting_repo;
    }
    send("hello_ok", {{"server_version", kServerVersion}, {"protocol", kProtocolVersion}, {"reply_to", frame.seq}});
    return;
  }

  if (type == "bye") {
    close_connection();
  } else if (type == "hello") {
    send_error("BAD_STATE", "hello was already received", frame.seq);
  } else if (type == "create_repo" || type == "load_repo") {
    if (st == ConnState::active) {
      send_error("BAD_STATE", "this connection is already bound to a repository", frame.seq);
    } else {
      handle_bind(frame, type == "create_repo");
    }
  } else if (type == "event" || type == "view_bookmark") {
    if (st != ConnState::active) {
      send_error("NO_REPO", "create_repo or load_repo must come first", frame.seq);
    } else {
      handle_event(frame, type == "view_bookmark");
    }
  } else {
    send_error("UNKNOWN_TYPE", "unknown frame type '" + type + "'", frame.seq);
  }
}

void ToolSession::handle_bind(const Frame& frame, bool create) {
  auto name = frame.payload.find("name");
  if (name == frame.payload.end() || !name->is_string()) {
    send_error("INVALID_NAME", "payload needs a repository name", frame.seq);
    return;
  }
  context_.bind_client(this, name->get<std::string>(), create);
  {
    std::lock_guard lock(out_mu_);
    state_ = ConnState::active;
  }
  context_.with_session([&](session::Session& s) {
    s.set_scene(scene_);
    if (create) {
      auto root = s.repo().get_commit(s.head().commit);
      send("committed", {{"commit_id", root.id.hex()},
                         {"kind", std::string(provstore::kind_name(root.kind))},
                         {"head", head_to_json(s.head())},
                         {"reply_to", frame.seq}});
    } else {
      auto head = s.head();
      send("restore", {{"commit", head.commit.hex()},
                       {"head", head_to_json(head)},
                       {"snapshot", snapshot_to_wire(s.current())},
                       {"reason", "load"},
                       {"reply_to", frame.seq}});
    }
    return 0;
  });
}

void ToolSession::handle_event(const Frame& frame, bool bookmark) {
  session::InteractionEvent event;
  try {
    event = event_from_wire(frame.payload, bookmark);
  } catch (const Error& e) {
    send_error("BAD_EVENT", e.what(), frame.seq);
    return;
  }
  try {
    context_.with_session([&](session::Session& s) {
      auto result = s.record_interaction(event);
      auto payload = committed_payload(result, s.head());
      payload["reply_to"] = frame.seq;
      send("committed", std::move(payload));
      return 0;
    });
  } catch (const Error& e) {
    send_error(event_error_code(e.code()), e.what(), frame.seq);
    return;
  }
  context_.notify_graph_changed();
}

} // namespace labbook::protocol
