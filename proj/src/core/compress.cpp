#include "labbook/compress.hpp"

#include <zlib.h>

#include "labbook/error.hpp"

namespace labbook {

namespace {

std::string inflate_stream(std::string_view bytes, int window_bits, std::size_t max_size) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) {
    throw Error(Errc::integrity_error, "inflateInit failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());

  std::string out;
  char buf[16384];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(Errc::integrity_error, "corrupt deflate stream");
    }
    out.append(buf, sizeof buf - zs.avail_out);
    if (out.size() > max_size) {
      inflateEnd(&zs);
      throw Error(Errc::integrity_error, "inflated data exceeds limit");
    }
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(Errc::integrity_error, "truncated deflate stream");
    }
  }
  bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) {
    throw Error(Errc::integrity_error, "trailing bytes after deflate stream");
  }
  return out;
}

} // namespace

std::string zlib_compress(std::string_view bytes, int level) {
  uLongf bound = compressBound(static_cast<uLong>(bytes.size()));
  std::string out(bound, '\0');
  int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                     reinterpret_cast<const Bytef*>(bytes.data()),
                     static_cast<uLong>(bytes.size()), level);
  if (rc != Z_OK) {
    throw Error(Errc::io_error, "zlib compression failed");
  }
  out.resize(bound);
  return out;
}

std::string zlib_decompress(std::string_view bytes, std::size_t max_size) {
  return inflate_stream(bytes, 15, max_size);
}

std::string raw_inflate(std::string_view bytes, std::size_t expected_size) {
  std::string out = inflate_stream(bytes, -15, expected_size);
  if (out.size() != expected_size) {
    throw Error(Errc::integrity_error, "inflated size mismatch");
  }
  return out;
}

std::uint32_t crc32_of(std::string_view bytes, std::uint32_t seed) {
  return static_cast<std::uint32_t>(crc32(seed, reinterpret_cast<const Bytef*>(bytes.data()),
                                          static_cast<uInt>(bytes.size())));
}

} // namespace labbook
