#include "labbook/provstore/loose.hpp"

#include <charconv>

#include "labbook/compress.hpp"
#include "labbook/error.hpp"

namespace labbook::provstore {

std::string encode_loose_object(ObjectKind kind, std::string_view content) {
  std::string raw = std::string(kind_name(kind)) + " " + std::to_string(content.size());
  raw.push_back('\0');
  raw.append(content);
  return zlib_compress(raw);
}

LooseObject decode_loose_object(std::string_view compressed) {
  std::string raw = zlib_decompress(compressed);
  auto nul = raw.find('\0');
  auto sp = raw.find(' ');
  if (nul == std::string::npos || sp == std::string::npos || sp > nul) {
    throw Error(Errc::integrity_error, "loose object header malformed");
  }
  auto kind = parse_object_kind(std::string_view(raw).substr(0, sp));
  if (!kind) {
    throw Error(Errc::integrity_error, "loose object has unknown kind");
  }
  std::size_t len = 0;
  const char* first = raw.data() + sp + 1;
  const char* last = raw.data() + nul;
  auto [p, ec] = std::from_chars(first, last, len);
  if (ec != std::errc{} || p != last || len != raw.size() - nul - 1) {
    throw Error(Errc::integrity_error, "loose object length mismatch");
  }
  return LooseObject{*kind, raw.substr(nul + 1)};
}

std::filesystem::path loose_object_path(const std::filesystem::path& repo, const ObjectId& id) {
  const auto& hex = id.hex();
  return repo / "objects" / hex.substr(0, 2) / hex.substr(2);
}

} // namespace labbook::provstore
