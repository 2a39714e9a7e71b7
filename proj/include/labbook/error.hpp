#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace labbook {

enum class Errc {
  not_found,
  already_exists,
  invalid_name,
  invalid_input,
  integrity_error,
  corrupt_bundle,
  unsupported,
  repo_error,
  inapplicable,
  degenerate_geometry,
  invalid_snapshot,
  script_error,
  io_error,
  busy,
  no_client,
  no_session,
};

// Stable, upper-case identifier used on stderr and in wire error frames.
std::string_view code_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace labbook
