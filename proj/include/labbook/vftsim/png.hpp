#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace labbook::vftsim {

// 8-bit RGB, rows top to bottom, no interlace, filter type 0 on every row.
std::string encode_png_rgb(std::uint32_t width, std::uint32_t height, std::string_view rgb);

struct PngInfo {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::string rgb; // decoded pixels when the image is 8-bit RGB, filter 0
};

// Validates signature, chunk CRCs, IHDR and that IDAT inflates to the
// expected size. Throws Error(invalid_input) otherwise.
PngInfo inspect_png(std::string_view bytes);

bool has_png_signature(std::string_view bytes) noexcept;

} // namespace labbook::vftsim
