#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>

#include "labbook/protocol/frame.hpp"
#include "labbook/protocol/server_context.hpp"

namespace labbook::protocol {

/// Where a connection's outbound lines go.
class FrameSink {
public:
  virtual ~FrameSink() = default;
  virtual void send_line(const std::string& line) = 0;
  virtual void close() = 0;
};

enum class ConnState { handshake, awaiting_repo, active, closed };

std::string_view state_name(ConnState state) noexcept;

/// Server side of one tool connection, independent of the transport so it
/// can be driven line by line. Thread-safe against pushes from HTTP handlers.
class ToolSession final : public ClientLink {
public:
  ToolSession(ServerContext& context, FrameSink& sink);
  ~ToolSession() override;
  ToolSession(const ToolSession&) = delete;
  ToolSession& operator=(const ToolSession&) = delete;

  void on_line(std::string_view line);
  // The peer sent more than the frame limit without a line feed.
  void on_oversize();
  void on_disconnect();

  ConnState state() const;
  bool closed() const { return state() == ConnState::closed; }

  void push(const std::string& type, Json payload) override;

private:
  void handle(const Frame& frame);
  void handle_bind(const Frame& frame, bool create);
  void handle_event(const Frame& frame, bool bookmark);
  void send(const std::string& type, Json payload);
  void send_error(std::string_view code, const std::string& message, std::optional<std::int64_t> reply_to);
  void close_connection();

  ServerContext& context_;
  FrameSink& sink_;
  mutable std::mutex out_mu_; // guards sink_, out_seq_ and state_
  std::int64_t out_seq_ = 0;
  std::optional<std::int64_t> last_in_seq_;
  ConnState state_ = ConnState::handshake;
  std::string client_name_;
  std::string scene_ = "ramp";
  bool bound_ = false;
};

} // namespace labbook::protocol
