#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace labbook {

// RFC 1950 (zlib-wrapped DEFLATE).
std::string zlib_compress(std::string_view bytes, int level = 6);
// Throws Error(integrity_error) on malformed input or output past max_size.
std::string zlib_decompress(std::string_view bytes, std::size_t max_size = std::size_t{1} << 31);
// RFC 1951 raw DEFLATE stream, as found in ZIP entries.
std::string raw_inflate(std::string_view bytes, std::size_t expected_size);

std::uint32_t crc32_of(std::string_view bytes, std::uint32_t seed = 0);

} // namespace labbook
