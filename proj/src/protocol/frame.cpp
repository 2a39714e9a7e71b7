#include "labbook/protocol/frame.hpp"

#include <algorithm>

namespace labbook::protocol {

std::string encode_frame(const Frame& frame) {
  Json j = {{"v", kProtocolVersion}, {"type", frame.type}, {"seq", frame.seq}, {"payload", frame.payload}};
  return canonical_dump(j);
}

std::variant<Frame, FrameError> decode_frame(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return FrameError{"BAD_FRAME", "frame is not valid JSON"};
  if (!j.is_object()) return FrameError{"BAD_FRAME", "frame must be a JSON object"};
  auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer() || v->get<std::int64_t>() != kProtocolVersion) {
    return FrameError{"BAD_FRAME", "unsupported or missing protocol version"};
  }
  auto type = j.find("type");
  if (type == j.end() || !type->is_string()) return FrameError{"BAD_FRAME", "frame type must be a string"};
  auto seq = j.find("seq");
  if (seq == j.end() || !seq->is_number_integer() || seq->get<std::int64_t>() < 0) {
    return FrameError{"BAD_FRAME", "seq must be a non-negative integer"};
  }
  auto payload = j.find("payload");
  if (payload == j.end() || !payload->is_object()) return FrameError{"BAD_FRAME", "payload must be an object"};
  return Frame{type->get<std::string>(), seq->get<std::int64_t>(), *payload};
}

std::optional<std::string> LineReader::next_line() {
  auto nl = buffer_.find('\n', std::max(start_, scanned_));
  if (nl == std::string::npos) {
    scanned_ = buffer_.size();
    if (buffered() > max_line_) throw LineTooLong{};
    return std::nullopt;
  }
  if (nl - start_ > max_line_) throw LineTooLong{};
  std::string line = buffer_.substr(start_, nl - start_);
  start_ = nl + 1;
  if (start_ > (1 << 16) && start_ * 2 > buffer_.size()) {
    buffer_.erase(0, start_);
    scanned_ = 0;
    start_ = 0;
  }
  return line;
}

bool LineReader::overflowed() const noexcept {
  return buffered() > max_line_ && buffer_.find('\n', start_) == std::string::npos;
}

} // namespace labbook::protocol
