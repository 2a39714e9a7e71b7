#include "labbook/vftsim/render.hpp"

#include "labbook/canonical_json.hpp"
#include "labbook/encoding.hpp"
#include "labbook/vftsim/measurement_json.hpp"
#include "labbook/vftsim/png.hpp"

namespace labbook::vftsim {

namespace {

constexpr int kCols = 16;
constexpr int kRows = 9;
constexpr int kCell = 20;

struct Rgb {
  std::uint8_t r, g, b;
};

} // namespace

std::string render_screenshot(std::string_view scene_name, const std::vector<Measurement>& measurements,
                              const CameraPose& camera) {
  Json shapes = Json::array();
  for (const auto& m : measurements) shapes.push_back(shape_to_json(m.shape));
  Json state = {{"scene", std::string(scene_name)}, {"measurements", shapes}, {"camera", camera_to_json(camera)}};
  auto state_digest = sha1(canonical_dump(state));
  auto scene_digest = sha1(scene_name);

  // Muted background, bright foreground.
  Rgb bg{static_cast<std::uint8_t>(32 + scene_digest[0] % 96), static_cast<std::uint8_t>(32 + scene_digest[1] % 96),
         static_cast<std::uint8_t>(32 + scene_digest[2] % 96)};
  Rgb fg{static_cast<std::uint8_t>(160 + state_digest[0] % 96), static_cast<std::uint8_t>(160 + state_digest[1] % 96),
         static_cast<std::uint8_t>(160 + state_digest[2] % 96)};

  // 144 cells need more bits than one digest holds.
  std::string bits;
  std::string seed(reinterpret_cast<const char*>(state_digest.data()), state_digest.size());
  for (char block = 0; bits.size() * 8 < kCols * kRows; ++block) {
    auto d = sha1(seed + block);
    bits.append(reinterpret_cast<const char*>(d.data()), d.size());
  }
  auto lit = [&](int cell) { return (static_cast<unsigned char>(bits[cell / 8]) >> (cell % 8)) & 1; };

  std::string rgb(std::size_t{kScreenshotWidth} * kScreenshotHeight * 3, '\0');
  for (std::uint32_t y = 0; y < kScreenshotHeight; ++y) {
    for (std::uint32_t x = 0; x < kScreenshotWidth; ++x) {
      int cell = static_cast<int>(y / kCell) * kCols + static_cast<int>(x / kCell);
      bool border = x % kCell == 0 || y % kCell == 0;
      Rgb c = (lit(cell) && !border) ? fg : bg;
      auto at = (std::size_t{y} * kScreenshotWidth + x) * 3;
      rgb[at] = static_cast<char>(c.r);
      rgb[at + 1] = static_cast<char>(c.g);
      rgb[at + 2] = static_cast<char>(c.b);
    }
  }
  return encode_png_rgb(kScreenshotWidth, kScreenshotHeight, rgb);
}

} // namespace labbook::vftsim
