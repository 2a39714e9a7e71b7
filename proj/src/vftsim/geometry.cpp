#include "labbook/vftsim/geometry.hpp"

#include <cmath>
#include <numbers>

#include "labbook/error.hpp"

namespace labbook::vftsim {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

void require_finite(const Point3& p, const char* what) {
  if (!is_finite(p)) {
    throw Error(Errc::invalid_input, std::string(what) + " has non-finite coordinates");
  }
}

} // namespace

bool is_finite(const Point3& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

Point3 operator-(const Point3& a, const Point3& b) noexcept {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

Point3 cross(const Point3& a, const Point3& b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Point3& a, const Point3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Point3& a) noexcept { return std::hypot(a.x, a.y, a.z); }

void validate_camera(const CameraPose& pose) {
  require_finite(pose.position, "camera position");
  const auto& q = pose.orientation;
  double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9) {
    throw Error(Errc::invalid_input, "camera orientation is not a unit quaternion");
  }
}

Distance measure_distance(const Point3& a, const Point3& b) {
  require_finite(a, "distance start");
  require_finite(b, "distance end");
  return Distance{a, b, norm(b - a)};
}

StrikeDip measure_strike_dip(const Point3& p1, const Point3& p2, const Point3& p3) {
  require_finite(p1, "p1");
  require_finite(p2, "p2");
  require_finite(p3, "p3");
  Point3 u = p2 - p1;
  Point3 v = p3 - p1;
  Point3 n = cross(u, v);
  double len = norm(n);
  // |u x v| = |u||v| sin(angle); relative threshold keeps the test scale-free.
  if (!(len > 1e-12 * norm(u) * norm(v)) || len == 0.0) {
    throw Error(Errc::degenerate_geometry, "strike & dip needs three non-collinear points");
  }
  if (n.z < 0) n = {-n.x, -n.y, -n.z};

  StrikeDip out{p1, p2, p3, 0, 0, 0};
  double horizontal = std::hypot(n.x, n.y);
  out.dip_deg = std::atan2(horizontal, n.z) * kDeg;
  if (out.dip_deg < 1e-9) {
    out.dip_deg = std::max(out.dip_deg, 0.0);
    return out;
  }
  out.dip_direction_deg = wrap_degrees(std::atan2(n.x, n.y) * kDeg);
  out.strike_deg = wrap_degrees(out.dip_direction_deg - 90.0);
  return out;
}

MeasurementShape remeasure(const MeasurementShape& shape) {
  return std::visit(
      [](const auto& s) -> MeasurementShape {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LocationMarker>) {
          require_finite(s.p, "marker");
          return s;
        } else if constexpr (std::is_same_v<T, Distance>) {
          return measure_distance(s.a, s.b);
        } else {
          return measure_strike_dip(s.p1, s.p2, s.p3);
        }
      },
      shape);
}

std::string_view shape_kind(const MeasurementShape& shape) noexcept {
  switch (shape.index()) {
  case 0: return "marker";
  case 1: return "distance";
  default: return "strike_dip";
  }
}

} // namespace labbook::vftsim
