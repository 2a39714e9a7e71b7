#include "labbook/provstore/object_id.hpp"

#include "labbook/error.hpp"

namespace labbook::provstore {

std::optional<ObjectId> ObjectId::parse(std::string_view hex) {
  if (hex.size() != 40) return std::nullopt;
  for (char c : hex) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
  }
  return ObjectId(std::string(hex));
}

ObjectId ObjectId::from_hex(std::string_view hex) {
  auto id = parse(hex);
  if (!id) {
    throw Error(Errc::invalid_input, "not an object id: '" + std::string(hex.substr(0, 64)) + "'");
  }
  return *id;
}

ObjectId ObjectId::from_digest(const Sha1Digest& digest) { return ObjectId(to_hex(digest)); }

ObjectId ObjectId::from_raw(std::string_view raw20) {
  if (raw20.size() != 20) {
    throw Error(Errc::integrity_error, "raw object id must be 20 bytes");
  }
  return ObjectId(to_hex({reinterpret_cast<const std::uint8_t*>(raw20.data()), raw20.size()}));
}

std::string ObjectId::raw() const { return *labbook::from_hex(hex_); }

} // namespace labbook::provstore
