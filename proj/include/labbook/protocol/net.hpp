#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

// Minimal blocking TCP over POSIX sockets.
namespace labbook::net {

class Socket {
public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  bool valid() const noexcept { return fd_ >= 0; }
  int fd() const noexcept { return fd_; }

  // 0 on orderly shutdown. Throws Error(io_error) on failure.
  std::size_t read_some(char* buf, std::size_t len);
  // Throws Error(io_error).
  void write_all(std::string_view bytes);
  // Waits until readable; false on timeout.
  bool wait_readable(std::chrono::milliseconds timeout);
  void set_send_timeout(std::chrono::milliseconds timeout);
  // Unblocks pending reads in other threads.
  void shutdown() noexcept;
  void close() noexcept;

private:
  int fd_ = -1;
};

class Listener {
public:
  // Port 0 picks an ephemeral port. Throws Error(io_error).
  static Listener bind(const std::string& host, std::uint16_t port);

  std::uint16_t port() const noexcept { return port_; }
  // nullopt on timeout.
  std::optional<Socket> accept(std::chrono::milliseconds timeout);
  void close() noexcept { socket_.close(); }

private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

// Throws Error(io_error), e.g. on connection refused.
Socket connect_tcp(const std::string& host, std::uint16_t port);

} // namespace labbook::net
