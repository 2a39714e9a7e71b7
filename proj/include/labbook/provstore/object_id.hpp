#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "labbook/encoding.hpp"

namespace labbook::provstore {

/// SHA-1 object name, held as 40 lowercase hex characters.
class ObjectId {
public:
  ObjectId() : hex_(40, '0') {}

  // Accepts exactly 40 lowercase hex characters.
  static std::optional<ObjectId> parse(std::string_view hex);
  // As parse(), but throws Error(invalid_input).
  static ObjectId from_hex(std::string_view hex);
  static ObjectId from_digest(const Sha1Digest& digest);
  static ObjectId from_raw(std::string_view raw20);

  const std::string& hex() const noexcept { return hex_; }
  std::string raw() const;
  bool is_null() const noexcept { return hex_.find_first_not_of('0') == std::string::npos; }

  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;

private:
  explicit ObjectId(std::string hex) : hex_(std::move(hex)) {}
  std::string hex_;
};

inline std::ostream& operator<<(std::ostream& os, const ObjectId& id) { return os << id.hex(); }

} // namespace labbook::provstore

template <>
struct std::hash<labbook::provstore::ObjectId> {
  std::size_t operator()(const labbook::provstore::ObjectId& id) const noexcept {
    return std::hash<std::string>{}(id.hex());
  }
};
