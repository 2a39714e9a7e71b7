#include "labbook/error.hpp"

namespace labbook {

std::string_view code_name(Errc code) noexcept {
  switch (code) {
  case Errc::not_found: return "NOT_FOUND";
  case Errc::already_exists: return "ALREADY_EXISTS";
  case Errc::invalid_name: return "INVALID_NAME";
  case Errc::invalid_input: return "INVALID_INPUT";
  case Errc::integrity_error: return "INTEGRITY_ERROR";
  case Errc::corrupt_bundle: return "CORRUPT_BUNDLE";
  case Errc::unsupported: return "UNSUPPORTED";
  case Errc::repo_error: return "REPO_ERROR";
  case Errc::inapplicable: return "INAPPLICABLE";
  case Errc::degenerate_geometry: return "DEGENERATE_GEOMETRY";
  case Errc::invalid_snapshot: return "INVALID_SNAPSHOT";
  case Errc::script_error: return "SCRIPT_ERROR";
  case Errc::io_error: return "IO_ERROR";
  case Errc::busy: return "BUSY";
  case Errc::no_client: return "NO_CLIENT";
  case Errc::no_session: return "NO_SESSION";
  }
  return "UNKNOWN";
}

} // namespace labbook
