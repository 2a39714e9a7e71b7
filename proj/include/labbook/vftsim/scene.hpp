#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "labbook/canonical_json.hpp"
#include "labbook/vftsim/geometry.hpp"

namespace labbook::vftsim {

struct Model {
  std::string name;
  std::vector<Point3> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
};

struct Scene {
  std::string name;
  std::vector<Model> models;
};

// At least one model, finite vertices, triangle indices in range.
void validate_scene(const Scene& scene);

// {name, models:[{name, vertices:[[x,y,z]...], triangles:[[i,j,k]...]}]}
Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);
Scene load_scene(const std::filesystem::path& path);

// Bundled sample meshes: "ramp" (tilted plane), "vent" (cone), "terrace"
// (stepped slope). Throws Error(not_found) for other names.
Scene builtin_scene(const std::string& name);
std::vector<std::string> builtin_scene_names();

// A builtin name, or else a path to a scene JSON file.
Scene resolve_scene(const std::string& name_or_path);

} // namespace labbook::vftsim
