#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "labbook/time.hpp"

namespace labbook::protocol {

enum class ClockMode { real, fixed };

struct Config {
  std::filesystem::path repo_root = "labbook-repos";
  std::uint16_t tool_port = 7341;
  std::uint16_t http_port = 7342;
  std::string bind = "127.0.0.1";
  std::string author = "labbook";
  ClockMode clock = ClockMode::real;
  std::int64_t clock_start = FixedClock::kDefaultStart;
};

// Sets one key (repo_root, port, http_port, bind, author, clock, clock_start).
// `source` names the origin for error messages. Throws Error(invalid_input).
void set_config_key(Config& config, const std::string& key, const std::string& value, const std::string& source);

// Plain key=value lines; '#' starts a comment line.
void apply_config_text(Config& config, std::string_view text, const std::string& source);
// Throws Error(not_found) if the file cannot be read.
void apply_config_file(Config& config, const std::filesystem::path& path);

// LABBOOK_REPO_ROOT, LABBOOK_PORT, LABBOOK_HTTP_PORT, LABBOOK_BIND,
// LABBOOK_AUTHOR, LABBOOK_CLOCK, LABBOOK_CLOCK_START.
std::map<std::string, std::string> labbook_environment();
void apply_environment(Config& config, const std::map<std::string, std::string>& env);

// Ports distinct (ephemeral 0 excepted) and repo_root creatable and
// writable. Throws Error(invalid_input).
void validate_config(const Config& config);

std::shared_ptr<Clock> make_clock(const Config& config);

} // namespace labbook::protocol
