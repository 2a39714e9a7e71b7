#pragma once

#include <atomic>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "labbook/protocol/net.hpp"
#include "labbook/protocol/server_context.hpp"

namespace labbook::protocol {

/// Accepts tool connections and runs one ToolSession per connection thread.
class ToolServer {
public:
  ToolServer(ServerContext& context, const std::string& host, std::uint16_t port);
  ~ToolServer();
  ToolServer(const ToolServer&) = delete;
  ToolServer& operator=(const ToolServer&) = delete;

  std::uint16_t port() const noexcept { return listener_.port(); }
  void start();
  // Closes the listener and every connection, then joins all threads.
  void stop();

private:
  struct Connection;
  void accept_loop();
  void serve_connection(Connection& conn);
  void reap_finished();

  ServerContext& context_;
  net::Listener listener_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conns_mu_;
  std::list<std::unique_ptr<Connection>> conns_;
};

} // namespace labbook::protocol
