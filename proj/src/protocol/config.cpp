#include "labbook/protocol/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "labbook/error.hpp"

extern char** environ;

namespace labbook::protocol {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_int(const std::string& value, const std::string& what, T lo, T hi) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || out < lo || out > hi) {
    throw Error(Errc::invalid_input, what + ": invalid value '" + value + "'");
  }
  return out;
}

const std::pair<const char*, const char*> kEnvKeys[] = {
    {"LABBOOK_REPO_ROOT", "repo_root"}, {"LABBOOK_PORT", "port"},   {"LABBOOK_HTTP_PORT", "http_port"},
    {"LABBOOK_BIND", "bind"},           {"LABBOOK_AUTHOR", "author"}, {"LABBOOK_CLOCK", "clock"},
    {"LABBOOK_CLOCK_START", "clock_start"},
};

} // namespace

void set_config_key(Config& c, const std::string& key, const std::string& value, const std::string& source) {
  auto what = source + ": " + key;
  if (key == "repo_root") {
    if (value.empty()) throw Error(Errc::invalid_input, what + " must not be empty");
    c.repo_root = value;
  } else if (key == "port") {
    c.tool_port = parse_int<std::uint16_t>(value, what, 0, 65535);
  } else if (key == "http_port") {
    c.http_port = parse_int<std::uint16_t>(value, what, 0, 65535);
  } else if (key == "bind") {
    c.bind = value;
  } else if (key == "author") {
    if (value.empty()) throw Error(Errc::invalid_input, what + " must not be empty");
    c.author = value;
  } else if (key == "clock") {
    if (value == "real") {
      c.clock = ClockMode::real;
    } else if (value == "fixed") {
      c.clock = ClockMode::fixed;
    } else {
      throw Error(Errc::invalid_input, what + " must be 'real' or 'fixed'");
    }
  } else if (key == "clock_start") {
    c.clock_start = parse_int<std::int64_t>(value, what, 0, std::int64_t{1} << 40);
  } else {
    throw Error(Errc::invalid_input, source + ": unknown key '" + key + "'");
  }
}

void apply_config_text(Config& c, std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    auto where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(Errc::invalid_input, where + ": expected key=value");
    set_config_key(c, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)), where);
  }
}

void apply_config_file(Config& c, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(c, ss.str(), path.string());
}

std::map<std::string, std::string> labbook_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (!kv.starts_with("LABBOOK_")) continue;
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return env;
}

void apply_environment(Config& c, const std::map<std::string, std::string>& env) {
  for (const auto& [var, key] : kEnvKeys) {
    if (auto it = env.find(var); it != env.end()) set_config_key(c, key, it->second, var);
  }
}

void validate_config(const Config& c) {
  if (c.tool_port != 0 && c.tool_port == c.http_port) {
    throw Error(Errc::invalid_input, "tool port and HTTP port must differ (both " + std::to_string(c.tool_port) + ")");
  }
  std::error_code ec;
  std::filesystem::create_directories(c.repo_root, ec);
  if (ec || !std::filesystem::is_directory(c.repo_root) || ::access(c.repo_root.c_str(), W_OK) != 0) {
    throw Error(Errc::invalid_input, "repo_root " + c.repo_root.string() + " is not a writable directory");
  }
}

std::shared_ptr<Clock> make_clock(const Config& c) {
  if (c.clock == ClockMode::fixed) return std::make_shared<FixedClock>(c.clock_start);
  return std::make_shared<SystemClock>();
}

} // namespace labbook::protocol
