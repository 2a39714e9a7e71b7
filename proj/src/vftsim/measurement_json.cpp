#include "labbook/vftsim/measurement_json.hpp"

#include <cmath>
#include <set>

#include "labbook/error.hpp"

namespace labbook::vftsim {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_input, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) bad(std::string(what) + " must be finite");
  return v;
}

std::string string_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

} // namespace

Json point_to_json(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

Point3 point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) bad("a point is an array of three numbers");
  return {number(j[0], "x"), number(j[1], "y"), number(j[2], "z")};
}

Json shape_to_json(const MeasurementShape& shape) {
  Json j = std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LocationMarker>) {
          return {{"p", point_to_json(s.p)}, {"label", s.label}};
        } else if constexpr (std::is_same_v<T, Distance>) {
          return {{"a", point_to_json(s.a)}, {"b", point_to_json(s.b)}, {"length_m", s.length_m}};
        } else {
          return {{"p1", point_to_json(s.p1)},
                  {"p2", point_to_json(s.p2)},
                  {"p3", point_to_json(s.p3)},
                  {"strike_deg", s.strike_deg},
                  {"dip_deg", s.dip_deg},
                  {"dip_direction_deg", s.dip_direction_deg}};
        }
      },
      shape);
  j["kind"] = std::string(shape_kind(shape));
  return j;
}

MeasurementShape shape_from_json(const Json& j) {
  auto kind = string_field(j, "kind");
  if (kind == "marker") {
    return LocationMarker{point_from_json(field(j, "p")), string_field(j, "label")};
  }
  if (kind == "distance") {
    return Distance{point_from_json(field(j, "a")), point_from_json(field(j, "b")),
                    number(field(j, "length_m"), "length_m")};
  }
  if (kind == "strike_dip") {
    return StrikeDip{point_from_json(field(j, "p1")),
                     point_from_json(field(j, "p2")),
                     point_from_json(field(j, "p3")),
                     number(field(j, "strike_deg"), "strike_deg"),
                     number(field(j, "dip_deg"), "dip_deg"),
                     number(field(j, "dip_direction_deg"), "dip_direction_deg")};
  }
  bad("unknown measurement kind '" + kind + "'");
}

Json measurement_to_json(const Measurement& m) {
  Json j = shape_to_json(m.shape);
  j["id"] = m.id;
  return j;
}

Measurement measurement_from_json(const Json& j) {
  auto id = string_field(j, "id");
  if (id.empty()) bad("measurement id must not be empty");
  return Measurement{std::move(id), shape_from_json(j)};
}

Json measurements_to_json(const std::vector<Measurement>& list) {
  Json j = Json::array();
  for (const auto& m : list) j.push_back(measurement_to_json(m));
  return j;
}

std::vector<Measurement> measurements_from_json(const Json& j) {
  if (!j.is_array()) bad("measurements must be an array");
  std::vector<Measurement> out;
  std::set<std::string> ids;
  for (const auto& item : j) {
    out.push_back(measurement_from_json(item));
    if (!ids.insert(out.back().id).second) bad("duplicate measurement id " + out.back().id);
  }
  return out;
}

Json camera_to_json(const CameraPose& pose) {
  const auto& q = pose.orientation;
  return {{"position", point_to_json(pose.position)},
          {"orientation", Json::array({q.w, q.x, q.y, q.z})}};
}

CameraPose camera_from_json(const Json& j) {
  CameraPose pose;
  pose.position = point_from_json(field(j, "position"));
  const auto& q = field(j, "orientation");
  if (!q.is_array() || q.size() != 4) bad("orientation is an array [w, x, y, z]");
  pose.orientation = {number(q[0], "w"), number(q[1], "x"), number(q[2], "y"), number(q[3], "z")};
  validate_camera(pose);
  return pose;
}

} // namespace labbook::vftsim
