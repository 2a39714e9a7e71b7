#include "labbook/vftsim/png.hpp"

#include "labbook/compress.hpp"
#include "labbook/error.hpp"

namespace labbook::vftsim {

namespace {

constexpr std::string_view kSignature{"\x89PNG\r\n\x1a\n", 8};

void put_be32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::uint32_t get_be32(std::string_view s, std::size_t at) {
  if (at + 4 > s.size()) throw Error(Errc::invalid_input, "PNG truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

void put_chunk(std::string& out, std::string_view type, std::string_view data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type);
  body.append(data);
  out += body;
  put_be32(out, crc32_of(body));
}

} // namespace

bool has_png_signature(std::string_view bytes) noexcept { return bytes.starts_with(kSignature); }

std::string encode_png_rgb(std::uint32_t width, std::uint32_t height, std::string_view rgb) {
  if (rgb.size() != std::size_t{width} * height * 3) {
    throw Error(Errc::invalid_input, "pixel buffer does not match image size");
  }
  std::string ihdr;
  put_be32(ihdr, width);
  put_be32(ihdr, height);
  ihdr += std::string{'\x08', '\x02', '\x00', '\x00', '\x00'}; // 8-bit RGB

  std::string raw;
  raw.reserve(rgb.size() + height);
  for (std::uint32_t y = 0; y < height; ++y) {
    raw.push_back('\0');
    raw.append(rgb.substr(std::size_t{y} * width * 3, std::size_t{width} * 3));
  }

  std::string out(kSignature);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", zlib_compress(raw, 9));
  put_chunk(out, "IEND", "");
  return out;
}

PngInfo inspect_png(std::string_view bytes) {
  if (!has_png_signature(bytes)) throw Error(Errc::invalid_input, "not a PNG (bad signature)");
  PngInfo info;
  std::string idat;
  bool have_header = false;
  bool have_end = false;
  int bit_depth = 0;
  int color_type = 0;
  std::size_t pos = kSignature.size();
  while (pos < bytes.size() && !have_end) {
    std::uint32_t len = get_be32(bytes, pos);
    if (pos + 12 + std::size_t{len} > bytes.size()) throw Error(Errc::invalid_input, "PNG chunk truncated");
    auto body = bytes.substr(pos + 4, 4 + std::size_t{len});
    if (crc32_of(body) != get_be32(bytes, pos + 8 + len)) {
      throw Error(Errc::invalid_input, "PNG chunk CRC mismatch");
    }
    auto type = body.substr(0, 4);
    auto data = body.substr(4);
    if (type == "IHDR") {
      if (len != 13) throw Error(Errc::invalid_input, "PNG IHDR has wrong length");
      info.width = get_be32(data, 0);
      info.height = get_be32(data, 4);
      bit_depth = static_cast<unsigned char>(data[8]);
      color_type = static_cast<unsigned char>(data[9]);
      have_header = true;
    } else if (type == "IDAT") {
      idat.append(data);
    } else if (type == "IEND") {
      have_end = true;
    }
    pos += 12 + len;
  }
  if (!have_header || !have_end || info.width == 0 || info.height == 0) {
    throw Error(Errc::invalid_input, "PNG missing IHDR/IEND");
  }
  if (bit_depth == 8 && color_type == 2) {
    std::size_t stride = std::size_t{info.width} * 3;
    std::size_t expected = (stride + 1) * info.height;
    std::string raw;
    try {
      raw = zlib_decompress(idat, expected);
    } catch (const Error&) {
      throw Error(Errc::invalid_input, "PNG image data does not inflate");
    }
    if (raw.size() != expected) throw Error(Errc::invalid_input, "PNG image data has wrong size");
    for (std::uint32_t y = 0; y < info.height; ++y) {
      if (raw[y * (stride + 1)] == 0) {
        info.rgb.append(raw, y * (stride + 1) + 1, stride);
      } else {
        info.rgb.clear();
        break;
      }
    }
  }
  return info;
}

} // namespace labbook::vftsim
