#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "labbook/protocol/frame.hpp"
#include "labbook/protocol/net.hpp"
#include "labbook/sim/client_state.hpp"
#include "labbook/sim/script.hpp"

namespace labbook::sim {

/// Frame-level client for the tool link. Every frame in either direction is
/// appended to the transcript as "> line" (sent) or "< line" (received).
class ToolClient {
public:
  ToolClient(const std::string& host, std::uint16_t port);

  std::int64_t send(const std::string& type, Json payload);
  // Throws Error(io_error) on timeout or disconnect.
  protocol::Frame receive(std::chrono::milliseconds timeout);
  // Discards input until the server closes its end or the timeout passes.
  void wait_closed(std::chrono::milliseconds timeout);
  void close();

  std::vector<std::string>& transcript() noexcept { return transcript_; }
  std::function<void(const std::string&)> on_line;

private:
  void note(std::string line);

  net::Socket socket_;
  protocol::LineReader reader_;
  std::int64_t seq_ = 0;
  std::vector<std::string> transcript_;
};

enum class RepoMode { automatic, create, load };

struct RunOptions {
  std::string host = "127.0.0.1";
  std::uint16_t tool_port = 7341;
  std::uint16_t http_port = 7342;
  std::string repo = "default";
  RepoMode mode = RepoMode::automatic; // load, or create when missing
  std::string client_name = "labbook-sim";
  std::string scene = "ramp";
  std::chrono::milliseconds reply_timeout{30000};
  std::function<void(const std::string&)> on_line; // live transcript
};

struct RunResult {
  std::vector<std::string> transcript;
  std::vector<std::string> commits; // commits[0] is HEAD at bind, then one per ack
  std::size_t committed_acks = 0;
  std::optional<std::string> failure; // first refused step, naming its line
  ClientState client;
};

// Connects, greets, binds the repository when the first step needs it, runs
// every step, then says bye. Connection failures throw Error(io_error).
RunResult run_script(const std::vector<Step>& steps, const RunOptions& options);

} // namespace labbook::sim
