#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "labbook/canonical_json.hpp"

namespace labbook::protocol {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{8} << 20;

/// One NDJSON line: {"payload":{...},"seq":n,"type":"...","v":1}.
struct Frame {
  std::string type;
  std::int64_t seq = 0;
  Json payload = Json::object();
};

// Canonical JSON plus line feed.
std::string encode_frame(const Frame& frame);

struct FrameError {
  std::string code; // BAD_FRAME
  std::string message;
};

// Parses one line (without its terminator). Requires v == 1, a string type,
// an integer seq >= 0 and an object payload.
std::variant<Frame, FrameError> decode_frame(std::string_view line);

/// Splits a byte stream into lines, refusing lines longer than the frame
/// limit (the newline is not counted).
class LineReader {
public:
  explicit LineReader(std::size_t max_line = kMaxFrameBytes) : max_line_(max_line) {}

  void feed(std::string_view bytes) { buffer_.append(bytes); }
  // A complete line, if one is buffered. Throws LineTooLong.
  std::optional<std::string> next_line();
  // True once the buffer alone exceeds the limit without a line feed.
  bool overflowed() const noexcept;
  std::size_t buffered() const noexcept { return buffer_.size() - start_; }

  struct LineTooLong {};

private:
  std::size_t max_line_;
  std::string buffer_;
  std::size_t start_ = 0;
  std::size_t scanned_ = 0; // no line feed before this offset
};

} // namespace labbook::protocol
