#pragma once

#include <string>
#include <variant>
#include <vector>

namespace labbook::vftsim {

/// Metres, z up, +y north.
struct Point3 {
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

bool is_finite(const Point3& p) noexcept;
Point3 operator-(const Point3& a, const Point3& b) noexcept;
Point3 cross(const Point3& a, const Point3& b) noexcept;
double dot(const Point3& a, const Point3& b) noexcept;
double norm(const Point3& a) noexcept;

struct LocationMarker {
  Point3 p;
  std::string label;

  friend bool operator==(const LocationMarker&, const LocationMarker&) = default;
};

struct Distance {
  Point3 a;
  Point3 b;
  double length_m = 0;

  friend bool operator==(const Distance&, const Distance&) = default;
};

struct StrikeDip {
  Point3 p1;
  Point3 p2;
  Point3 p3;
  double strike_deg = 0;
  double dip_deg = 0;
  double dip_direction_deg = 0;

  friend bool operator==(const StrikeDip&, const StrikeDip&) = default;
};

using MeasurementShape = std::variant<LocationMarker, Distance, StrikeDip>;

struct Measurement {
  std::string id;
  MeasurementShape shape;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct Quaternion {
  double w = 1;
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

struct CameraPose {
  Point3 position;
  Quaternion orientation;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

// Throws Error(invalid_input) unless position is finite and |q| = 1 +- 1e-9.
void validate_camera(const CameraPose& pose);

Distance measure_distance(const Point3& a, const Point3& b);

/// Plane orientation through three points using the right-hand rule:
/// dip in [0, 90], dip direction clockwise from +y, strike = dip direction - 90.
/// Horizontal planes (dip < 1e-9 deg) report strike = dip direction = 0.
/// Throws Error(degenerate_geometry) for collinear or coincident points.
StrikeDip measure_strike_dip(const Point3& p1, const Point3& p2, const Point3& p3);

// Recomputes the derived fields (length, angles) from the shape's points.
MeasurementShape remeasure(const MeasurementShape& shape);

std::string_view shape_kind(const MeasurementShape& shape) noexcept;

} // namespace labbook::vftsim
