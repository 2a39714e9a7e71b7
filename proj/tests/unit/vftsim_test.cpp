#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "expect_errc.hpp"
#include "labbook/encoding.hpp"
#include "labbook/vftsim/geometry.hpp"
#include "labbook/vftsim/measurement_json.hpp"
#include "labbook/vftsim/png.hpp"
#include "labbook/vftsim/render.hpp"
#include "labbook/vftsim/scene.hpp"
#include "test_util.hpp"

namespace labbook::vftsim {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double angle_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

Point3 random_point(std::mt19937_64& rng, double span) {
  std::uniform_real_distribution<double> u(-span, span);
  return {u(rng), u(rng), u(rng)};
}

TEST(Distance, Fixtures) {
  EXPECT_EQ(measure_distance({1, 2, 3}, {1, 2, 3}).length_m, 0.0);
  EXPECT_EQ(measure_distance({0, 0, 0}, {3, 4, 0}).length_m, 5.0);
}

TEST(Distance, MatchesSumOfSquaresOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    auto a = random_point(rng, 1000);
    auto b = random_point(rng, 1000);
    long double sq = 0;
    for (auto [p, q] : {std::pair{a.x, b.x}, {a.y, b.y}, {a.z, b.z}}) sq += (long double)(p - q) * (p - q);
    double oracle = static_cast<double>(std::sqrt(sq));
    EXPECT_NEAR(measure_distance(a, b).length_m, oracle, 1e-12 * std::max(1.0, oracle));
  }
}

TEST(Distance, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 5000; ++i) {
    auto a = random_point(rng, 50);
    auto b = random_point(rng, 50);
    auto c = random_point(rng, 50);
    double ab = measure_distance(a, b).length_m;
    EXPECT_EQ(ab, measure_distance(b, a).length_m);
    EXPECT_LE(measure_distance(a, c).length_m, ab + measure_distance(b, c).length_m + 1e-12);
  }
}

TEST(StrikeDip, HorizontalPlane) {
  auto s = measure_strike_dip({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  EXPECT_EQ(s.dip_deg, 0.0);
  EXPECT_EQ(s.strike_deg, 0.0);
  EXPECT_EQ(s.dip_direction_deg, 0.0);
}

TEST(StrikeDip, PlaneZEqualsX) {
  auto s = measure_strike_dip({0, 0, 0}, {1, 0, 1}, {0, 1, 0});
  EXPECT_NEAR(s.dip_deg, 45.0, 1e-9);
  EXPECT_NEAR(s.dip_direction_deg, 270.0, 1e-9);
  EXPECT_NEAR(s.strike_deg, 180.0, 1e-9);
}

TEST(StrikeDip, VerticalPlane) {
  auto s = measure_strike_dip({0, 0, 0}, {1, 0, 0}, {0, 0, 1});
  EXPECT_NEAR(s.dip_deg, 90.0, 1e-12);
}

TEST(StrikeDip, DegenerateInputs) {
  EXPECT_ERRC(measure_strike_dip({0, 0, 0}, {1, 1, 1}, {2, 2, 2}), Errc::degenerate_geometry);
  EXPECT_ERRC(measure_strike_dip({1, 2, 3}, {1, 2, 3}, {1, 2, 3}), Errc::degenerate_geometry);
  EXPECT_ERRC(measure_strike_dip({0, 0, 0}, {0, 0, 0}, {5, 0, 0}), Errc::degenerate_geometry);
}

TEST(StrikeDip, AnglesWithinRangesAndLinked) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    auto s = measure_strike_dip(random_point(rng, 10), random_point(rng, 10), random_point(rng, 10));
    EXPECT_GE(s.dip_deg, 0.0);
    EXPECT_LE(s.dip_deg, 90.0);
    EXPECT_GE(s.strike_deg, 0.0);
    EXPECT_LT(s.strike_deg, 360.0);
    EXPECT_GE(s.dip_direction_deg, 0.0);
    EXPECT_LT(s.dip_direction_deg, 360.0);
    EXPECT_LT(angle_gap(s.dip_direction_deg, s.strike_deg + 90.0), 1e-9);
  }
}

TEST(StrikeDip, InvariantUnderPermutationTranslationScaling) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    Point3 p[3] = {random_point(rng, 10), random_point(rng, 10), random_point(rng, 10)};
    auto base = measure_strike_dip(p[0], p[1], p[2]);
    auto check = [&](const StrikeDip& s) {
      EXPECT_LT(std::fabs(s.dip_deg - base.dip_deg), 1e-7);
      EXPECT_LT(angle_gap(s.strike_deg, base.strike_deg), 1e-7);
      EXPECT_LT(angle_gap(s.dip_direction_deg, base.dip_direction_deg), 1e-7);
    };
    int idx[3] = {0, 1, 2};
    while (std::next_permutation(idx, idx + 3)) check(measure_strike_dip(p[idx[0]], p[idx[1]], p[idx[2]]));
    Point3 t = random_point(rng, 1000);
    double k = scale(rng);
    auto move = [&](Point3 q) { return Point3{q.x * k + t.x, q.y * k + t.y, q.z * k + t.z}; };
    check(measure_strike_dip(move(p[0]), move(p[1]), move(p[2])));
  }
}

// Fits z = a x + b y + c through the three points by Cramer's rule, then
// takes the gradient by central differences of the fitted surface.
TEST(StrikeDip, MatchesFiniteDifferencePlaneFit) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> slope(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    double ga = slope(rng);
    double gb = slope(rng);
    double gc = slope(rng);
    Point3 p[3];
    for (auto& q : p) {
      q = random_point(rng, 10);
      q.z = ga * q.x + gb * q.y + gc;
    }
    double det = p[0].x * (p[1].y - p[2].y) - p[0].y * (p[1].x - p[2].x) + (p[1].x * p[2].y - p[2].x * p[1].y);
    if (std::fabs(det) < 1.0) continue; // poorly conditioned triangle
    auto solve_col = [&](int col) {
      auto m = [&](int r, int c) {
        double row[3] = {p[r].x, p[r].y, 1.0};
        return c == col ? p[r].z : row[c];
      };
      double d = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                 m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                 m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
      return d / det;
    };
    double a = solve_col(0);
    double b = solve_col(1);
    double c = solve_col(2);
    auto z = [&](double x, double y) { return a * x + b * y + c; };
    const double h = 1e-3;
    double dzdx = (z(h, 0) - z(-h, 0)) / (2 * h);
    double dzdy = (z(0, h) - z(0, -h)) / (2 * h);
    double grad = std::hypot(dzdx, dzdy);
    double oracle_dip = std::atan(grad) * kDeg;
    // Steepest descent points against the gradient.
    double oracle_dd = std::fmod(std::atan2(-dzdx, -dzdy) * kDeg + 360.0, 360.0);

    auto s = measure_strike_dip(p[0], p[1], p[2]);
    EXPECT_NEAR(s.dip_deg, oracle_dip, 1e-7);
    if (oracle_dip > 1e-3) EXPECT_LT(angle_gap(s.dip_direction_deg, oracle_dd), 1e-7);
    // dip is the complement of the normal's elevation above the horizontal.
    auto n = cross(p[1] - p[0], p[2] - p[0]);
    double elevation = std::asin(std::fabs(n.z) / norm(n)) * kDeg;
    EXPECT_NEAR(s.dip_deg, 90.0 - elevation, 1e-7);
  }
}

TEST(Remeasure, RecomputesDerivedFields) {
  auto d = std::get<Distance>(remeasure(Distance{{0, 0, 0}, {0, 3, 4}, 99.0}));
  EXPECT_EQ(d.length_m, 5.0);
  auto s = std::get<StrikeDip>(remeasure(StrikeDip{{0, 0, 0}, {1, 0, 1}, {0, 1, 0}, 0, 0, 0}));
  EXPECT_NEAR(s.dip_deg, 45.0, 1e-9);
  auto m = std::get<LocationMarker>(remeasure(LocationMarker{{1, 2, 3}, "x"}));
  EXPECT_EQ(m.label, "x");
}

TEST(Camera, RejectsNonUnitQuaternion) {
  EXPECT_NO_THROW(validate_camera(CameraPose{}));
  EXPECT_ERRC(validate_camera(CameraPose{{0, 0, 0}, {1, 0, 0, 1e-3}}), Errc::invalid_input);
  EXPECT_ERRC(validate_camera(CameraPose{{NAN, 0, 0}, {}}), Errc::invalid_input);
  double h = std::sqrt(0.5);
  EXPECT_NO_THROW(validate_camera(CameraPose{{1, 2, 3}, {h, 0, h, 0}}));
}

TEST(MeasurementJson, RoundTripsAllKinds) {
  std::vector<Measurement> list = {
      {"a", LocationMarker{{1.5, -2, 3}, "outcrop \"A\""}},
      {"b", measure_distance({0, 0, 0}, {1, 1, 1})},
      {"c", measure_strike_dip({0, 0, 0}, {1, 0, 1}, {0, 1, 0})},
  };
  auto j = measurements_to_json(list);
  EXPECT_EQ(measurements_from_json(j), list);
  auto text = canonical_dump(j);
  EXPECT_EQ(canonical_dump(measurements_to_json(measurements_from_json(parse_json(text, "t")))), text);
}

TEST(MeasurementJson, RejectsMalformed) {
  EXPECT_ERRC(measurements_from_json(Json::object()), Errc::invalid_input);
  EXPECT_ERRC(measurement_from_json(Json{{"id", "x"}, {"kind", "blob"}}), Errc::invalid_input);
  EXPECT_ERRC(measurement_from_json(Json{{"id", "x"}, {"kind", "marker"}, {"p", {1, 2}}, {"label", ""}}),
              Errc::invalid_input);
  EXPECT_ERRC(measurement_from_json(Json{{"id", ""}, {"kind", "marker"}, {"p", {1, 2, 3}}, {"label", ""}}),
              Errc::invalid_input);
  Json dup = Json::array({measurement_to_json({"x", LocationMarker{}}), measurement_to_json({"x", LocationMarker{}})});
  EXPECT_ERRC(measurements_from_json(dup), Errc::invalid_input);
  EXPECT_ERRC(camera_from_json(Json{{"position", {0, 0, 0}}, {"orientation", {2, 0, 0, 0}}}), Errc::invalid_input);
}

TEST(Scene, BuiltinsAreValid) {
  for (const auto& name : builtin_scene_names()) {
    auto s = builtin_scene(name);
    EXPECT_EQ(s.name, name);
    EXPECT_NO_THROW(validate_scene(s));
    EXPECT_FALSE(s.models.empty());
    auto back = scene_from_json(parse_json(canonical_dump(scene_to_json(s)), "scene"));
    EXPECT_EQ(back.models.size(), s.models.size());
    EXPECT_EQ(back.models[0].triangles, s.models[0].triangles);
  }
  EXPECT_ERRC(builtin_scene("moon"), Errc::not_found);
}

TEST(Scene, LoaderValidates) {
  testing::TempDir dir;
  auto path = dir / "s.json";
  std::ofstream(path) << R"({"name":"t","models":[{"name":"m","vertices":[[0,0,0],[1,0,0],[0,1,0]],"triangles":[[0,1,2]]}]})";
  EXPECT_EQ(load_scene(path).models[0].vertices.size(), 3u);
  EXPECT_EQ(resolve_scene(path.string()).name, "t");
  std::ofstream(path) << R"({"name":"t","models":[{"name":"m","vertices":[[0,0,0]],"triangles":[[0,1,2]]}]})";
  EXPECT_ERRC(load_scene(path), Errc::invalid_input);
  std::ofstream(path) << R"({"name":"t","models":[]})";
  EXPECT_ERRC(load_scene(path), Errc::invalid_input);
  EXPECT_ERRC(load_scene(dir / "missing.json"), Errc::not_found);
}

TEST(Png, EncodeDecodeRoundTrip) {
  std::string rgb(4 * 3 * 3, '\0');
  for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = static_cast<char>(i * 7);
  auto png = encode_png_rgb(4, 3, rgb);
  auto info = inspect_png(png);
  EXPECT_EQ(info.width, 4u);
  EXPECT_EQ(info.height, 3u);
  EXPECT_EQ(info.rgb, rgb);
  png[20] ^= 1; // inside IHDR, breaks its CRC
  EXPECT_ERRC(inspect_png(png), Errc::invalid_input);
  EXPECT_ERRC(inspect_png("not a png"), Errc::invalid_input);
}

TEST(Screenshot, DeterministicValidPng) {
  std::vector<Measurement> ms = {{"x", measure_distance({0, 0, 0}, {1, 2, 3})}};
  CameraPose cam{{1, 2, 3}, {}};
  auto a = render_screenshot("ramp", ms, cam);
  auto b = render_screenshot("ramp", ms, cam);
  EXPECT_EQ(a, b);
  auto info = inspect_png(a);
  EXPECT_EQ(info.width, 320u);
  EXPECT_EQ(info.height, 180u);
  EXPECT_EQ(info.rgb.size(), 320u * 180u * 3u);
}

TEST(Screenshot, IgnoresIdsButNotState) {
  CameraPose cam;
  std::vector<Measurement> one = {{"id-1", LocationMarker{{1, 1, 1}, "m"}}};
  std::vector<Measurement> renamed = {{"id-2", LocationMarker{{1, 1, 1}, "m"}}};
  EXPECT_EQ(render_screenshot("vent", one, cam), render_screenshot("vent", renamed, cam));
  EXPECT_NE(render_screenshot("vent", one, cam), render_screenshot("ramp", one, cam));
  EXPECT_NE(render_screenshot("vent", one, cam), render_screenshot("vent", {}, cam));
}

TEST(Screenshot, CameraChangesBytes) {
  std::mt19937_64 rng(16);
  std::set<std::string> seen;
  for (int i = 0; i < 50; ++i) {
    CameraPose cam{random_point(rng, 100), {}};
    seen.insert(to_hex(sha1(render_screenshot("terrace", {}, cam))));
  }
  EXPECT_EQ(seen.size(), 50u);
}

} // namespace
} // namespace labbook::vftsim
