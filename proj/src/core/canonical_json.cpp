#include "labbook/canonical_json.hpp"

#include "labbook/error.hpp"

namespace labbook {

std::string compact_dump(const Json& value) {
  try {
    return value.dump(-1, ' ', false, Json::error_handler_t::strict);
  } catch (const Json::type_error& e) {
    throw Error(Errc::invalid_input, std::string("JSON not serializable: ") + e.what());
  }
}

std::string canonical_dump(const Json& value) { return compact_dump(value) + "\n"; }

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(Errc::invalid_input, std::string(what) + ": " + e.what());
  }
}

} // namespace labbook
