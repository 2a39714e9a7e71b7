#include "labbook/vftsim/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "labbook/error.hpp"
#include "labbook/vftsim/measurement_json.hpp"

namespace labbook::vftsim {

namespace {

Model grid_model(std::string name, int n, double size, auto height) {
  Model m{std::move(name), {}, {}};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      double x = size * i / n;
      double y = size * j / n;
      m.vertices.push_back({x, y, height(x, y)});
    }
  }
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      m.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
  return m;
}

Model cone_model(std::string name, int segments, double radius, double height) {
  Model m{std::move(name), {}, {}};
  m.vertices.push_back({0, 0, height});
  for (int k = 0; k < segments; ++k) {
    double a = 2 * std::numbers::pi * k / segments;
    m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), 0});
  }
  for (int k = 0; k < segments; ++k) {
    std::size_t a = 1 + static_cast<std::size_t>(k);
    std::size_t b = 1 + static_cast<std::size_t>((k + 1) % segments);
    m.triangles.push_back({0, a, b});
  }
  return m;
}

} // namespace

void validate_scene(const Scene& scene) {
  if (scene.models.empty()) {
    throw Error(Errc::invalid_input, "scene '" + scene.name + "' has no models");
  }
  for (const auto& m : scene.models) {
    for (const auto& v : m.vertices) {
      if (!is_finite(v)) throw Error(Errc::invalid_input, "model " + m.name + " has a non-finite vertex");
    }
    for (const auto& t : m.triangles) {
      for (auto i : t) {
        if (i >= m.vertices.size()) {
          throw Error(Errc::invalid_input, "model " + m.name + " has a triangle index out of range");
        }
      }
    }
  }
}

Json scene_to_json(const Scene& scene) {
  Json models = Json::array();
  for (const auto& m : scene.models) {
    Json verts = Json::array();
    for (const auto& v : m.vertices) verts.push_back(point_to_json(v));
    Json tris = Json::array();
    for (const auto& t : m.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
    models.push_back({{"name", m.name}, {"vertices", verts}, {"triangles", tris}});
  }
  return {{"name", scene.name}, {"models", models}};
}

Scene scene_from_json(const Json& j) {
  try {
    Scene s;
    s.name = j.at("name").get<std::string>();
    for (const auto& mj : j.at("models")) {
      Model m;
      m.name = mj.at("name").get<std::string>();
      for (const auto& v : mj.at("vertices")) m.vertices.push_back(point_from_json(v));
      for (const auto& t : mj.at("triangles")) {
        if (!t.is_array() || t.size() != 3) throw Error(Errc::invalid_input, "triangle needs 3 indices");
        m.triangles.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<std::size_t>()});
      }
      s.models.push_back(std::move(m));
    }
    validate_scene(s);
    return s;
  } catch (const Json::exception& e) {
    throw Error(Errc::invalid_input, std::string("malformed scene: ") + e.what());
  }
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot open scene file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(parse_json(ss.str(), "scene " + path.string()));
}

Scene builtin_scene(const std::string& name) {
  if (name == "ramp") {
    // 20 m square tilted 30 deg, dipping towards west.
    double slope = std::tan(30.0 * std::numbers::pi / 180.0);
    return {"ramp", {grid_model("ramp", 4, 20.0, [=](double x, double) { return slope * x; })}};
  }
  if (name == "vent") {
    return {"vent", {cone_model("vent", 24, 6.0, 8.0),
                     grid_model("seafloor", 2, 30.0, [](double, double) { return 0.0; })}};
  }
  if (name == "terrace") {
    return {"terrace", {grid_model("terrace", 8, 24.0, [](double x, double) {
              return 2.0 * std::floor(x / 6.0);
            })}};
  }
  throw Error(Errc::not_found, "no builtin scene named '" + name + "'");
}

std::vector<std::string> builtin_scene_names() { return {"ramp", "terrace", "vent"}; }

Scene resolve_scene(const std::string& name_or_path) {
  for (const auto& n : builtin_scene_names()) {
    if (n == name_or_path) return builtin_scene(n);
  }
  return load_scene(name_or_path);
}

} // namespace labbook::vftsim
