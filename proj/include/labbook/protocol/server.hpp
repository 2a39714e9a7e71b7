#pragma once

#include <memory>
#include <optional>
#include <string>

#include "labbook/protocol/config.hpp"
#include "labbook/protocol/http_api.hpp"
#include "labbook/protocol/server_context.hpp"
#include "labbook/protocol/tool_server.hpp"

namespace labbook::protocol {

/// Tool link plus HTTP API over one shared context.
class Server {
public:
  // Binds both ports immediately (0 = ephemeral). Throws Error(io_error).
  explicit Server(const Config& config);
  ~Server();

  ServerContext& context() noexcept { return context_; }
  std::uint16_t tool_port() const noexcept { return tool_.port(); }
  std::uint16_t http_port() const noexcept { return http_port_; }

  void start();
  void stop();

private:
  ServerContext context_;
  ToolServer tool_;
  HttpApi http_;
  std::uint16_t http_port_ = 0;
  bool stopped_ = false;
};

} // namespace labbook::protocol
