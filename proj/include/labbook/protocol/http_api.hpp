#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "labbook/protocol/server_context.hpp"

namespace labbook::protocol {

/// JSON API for the web UI under /api/v1, served from a background thread.
class HttpApi {
public:
  explicit HttpApi(ServerContext& context);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Port 0 picks an ephemeral port. Throws Error(io_error).
  std::uint16_t bind(const std::string& host, std::uint16_t port);
  void start();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP status for a domain error code.
int http_status_for(Errc code) noexcept;

} // namespace labbook::protocol
