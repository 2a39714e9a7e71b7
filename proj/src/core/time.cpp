#include "labbook/time.hpp"

#include <chrono>
#include <cstdio>

#include "labbook/error.hpp"

namespace labbook {

namespace {

using namespace std::chrono;

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw Error(Errc::invalid_input, "truncated timestamp");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') {
      throw Error(Errc::invalid_input, "bad digit in timestamp: " + std::string(text));
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(Errc::invalid_input, "malformed timestamp: " + std::string(text));
  }
}

} // namespace

std::string format_git_offset(int offset_minutes) {
  char sign = offset_minutes < 0 ? '-' : '+';
  int m = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d%02d", sign, m / 60, m % 60);
  return buf;
}

int parse_git_offset(std::string_view text) {
  if (text.size() != 5 || (text[0] != '+' && text[0] != '-')) {
    throw Error(Errc::invalid_input, "bad timezone offset: " + std::string(text));
  }
  int hours = parse_digits(text, 1, 2);
  int minutes = parse_digits(text, 3, 2);
  int total = hours * 60 + minutes;
  return text[0] == '-' ? -total : total;
}

std::string format_rfc3339(const Timestamp& ts) {
  sys_seconds local{seconds{ts.seconds + std::int64_t{ts.offset_minutes} * 60}};
  auto day = floor<days>(local);
  year_month_day ymd{day};
  hh_mm_ss tod{local - day};
  int off = ts.offset_minutes < 0 ? -ts.offset_minutes : ts.offset_minutes;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d%c%02d:%02d",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                ts.offset_minutes < 0 ? '-' : '+', off / 60, off % 60);
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS(Z|+HH:MM|-HH:MM)
  int y = parse_digits(text, 0, 4);
  expect_char(text, 4, '-');
  int mo = parse_digits(text, 5, 2);
  expect_char(text, 7, '-');
  int d = parse_digits(text, 8, 2);
  expect_char(text, 10, 'T');
  int h = parse_digits(text, 11, 2);
  expect_char(text, 13, ':');
  int mi = parse_digits(text, 14, 2);
  expect_char(text, 16, ':');
  int s = parse_digits(text, 17, 2);

  int offset = 0;
  if (text.size() == 20 && text[19] == 'Z') {
    offset = 0;
  } else if (text.size() == 25 && (text[19] == '+' || text[19] == '-')) {
    expect_char(text, 22, ':');
    offset = parse_digits(text, 20, 2) * 60 + parse_digits(text, 23, 2);
    if (text[19] == '-') offset = -offset;
  } else {
    throw Error(Errc::invalid_input, "malformed timestamp: " + std::string(text));
  }

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(Errc::invalid_input, "timestamp out of range: " + std::string(text));
  }
  auto local = sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s};
  std::int64_t secs = duration_cast<seconds>(local).count() - std::int64_t{offset} * 60;
  return Timestamp{secs, offset};
}

Timestamp SystemClock::now() {
  auto secs = duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
  return Timestamp{secs, 0};
}

Timestamp FixedClock::now() {
  std::lock_guard lock(mu_);
  Timestamp ts{next_, offset_};
  next_ += step_;
  return ts;
}

} // namespace labbook
