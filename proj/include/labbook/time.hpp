#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace labbook {

/// A point in time as git records it: whole UTC seconds plus the author's
/// local offset in minutes.
struct Timestamp {
  std::int64_t seconds = 0;
  int offset_minutes = 0;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

// "+hhmm" / "-hhmm", as used in commit headers.
std::string format_git_offset(int offset_minutes);
int parse_git_offset(std::string_view text);

// RFC 3339 in the author's local offset, e.g. 2023-11-14T22:13:20+01:00.
std::string format_rfc3339(const Timestamp& ts);
Timestamp parse_rfc3339(std::string_view text);

class Clock {
public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
};

class SystemClock final : public Clock {
public:
  Timestamp now() override;
};

/// Deterministic clock: returns start, start+step, start+2*step, ...
class FixedClock final : public Clock {
public:
  explicit FixedClock(std::int64_t start_seconds = kDefaultStart,
                      std::int64_t step_seconds = 1, int offset_minutes = 0)
      : next_(start_seconds), step_(step_seconds), offset_(offset_minutes) {}

  Timestamp now() override;

  static constexpr std::int64_t kDefaultStart = 1700000000;

private:
  std::mutex mu_;
  std::int64_t next_;
  std::int64_t step_;
  int offset_;
};

} // namespace labbook
