#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "labbook/vftsim/geometry.hpp"

namespace labbook::vftsim {

inline constexpr std::uint32_t kScreenshotWidth = 320;
inline constexpr std::uint32_t kScreenshotHeight = 180;

// Stand-in for a real viewport capture: a flat field coloured by the scene
// name with a 16x9 cell pattern keyed on the measurement geometry and camera.
// Measurement ids do not take part, so a client can render before the server
// has assigned the id of a new measurement.
std::string render_screenshot(std::string_view scene_name, const std::vector<Measurement>& measurements,
                              const CameraPose& camera);

} // namespace labbook::vftsim
