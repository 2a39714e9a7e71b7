#include "labbook/protocol/tool_server.hpp"

#include "labbook/error.hpp"
#include "labbook/protocol/tool_session.hpp"

namespace labbook::protocol {

struct ToolServer::Connection {
  net::Socket socket;
  std::thread thread;
  std::atomic<bool> done{false};
};

namespace {

class SocketSink final : public FrameSink {
public:
  explicit SocketSink(net::Socket& s) : socket_(s) {}

  void send_line(const std::string& line) override {
    if (broken_) return;
    try {
      socket_.write_all(line);
    } catch (const Error&) {
      broken_ = true;
      socket_.shutdown();
    }
  }
  void close() override { socket_.shutdown(); }

private:
  net::Socket& socket_;
  bool broken_ = false;
};

} // namespace

ToolServer::ToolServer(ServerContext& context, const std::string& host, std::uint16_t port)
    : context_(context), listener_(net::Listener::bind(host, port)) {}

ToolServer::~ToolServer() { stop(); }

void ToolServer::start() {
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void ToolServer::stop() {
  if (stopping_.exchange(true)) {
    if (accept_thread_.joinable()) accept_thread_.join();
    return;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  std::list<std::unique_ptr<Connection>> conns;
  {
    std::lock_guard lock(conns_mu_);
    conns.swap(conns_);
  }
  for (auto& c : conns) c->socket.shutdown();
  for (auto& c : conns) {
    if (c->thread.joinable()) c->thread.join();
  }
}

void ToolServer::reap_finished() {
  std::lock_guard lock(conns_mu_);
  for (auto it = conns_.begin(); it != conns_.end();) {
    if ((*it)->done) {
      if ((*it)->thread.joinable()) (*it)->thread.join();
      it = conns_.erase(it);
    } else {
      ++it;
    }
  }
}

void ToolServer::accept_loop() {
  while (!stopping_) {
    auto sock = listener_.accept(std::chrono::milliseconds(100));
    reap_finished();
    if (!sock) continue;
    auto conn = std::make_unique<Connection>();
    conn->socket = std::move(*sock);
    conn->socket.set_send_timeout(std::chrono::seconds(30));
    auto* raw = conn.get();
    std::lock_guard lock(conns_mu_);
    if (stopping_) break;
    conn->thread = std::thread([this, raw] { serve_connection(*raw); });
    conns_.push_back(std::move(conn));
  }
}

void ToolServer::serve_connection(Connection& conn) {
  SocketSink sink(conn.socket);
  {
    ToolSession session(context_, sink);
    LineReader reader;
    std::string buf(64 * 1024, '\0');
    try {
      while (!session.closed()) {
        auto n = conn.socket.read_some(buf.data(), buf.size());
        if (n == 0) break;
        reader.feed(std::string_view(buf.data(), n));
        try {
          while (auto line = reader.next_line()) {
            session.on_line(*line);
            if (session.closed()) break;
          }
        } catch (const LineReader::LineTooLong&) {
          session.on_oversize();
        }
      }
    } catch (const Error&) {
      // Connection reset; fall through to cleanup.
    }
    session.on_disconnect();
  }
  conn.done = true;
}

} // namespace labbook::protocol
