#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "support.hpp"
#include "tramsim/track.hpp"

using namespace tramsim;

TEST(Haversine, OneDegreeOfLatitude) {
  EXPECT_NEAR(haversine_distance({50.0, 14.0}, {51.0, 14.0}), kEarthRadius * std::numbers::pi / 180.0, 1e-6);
  EXPECT_DOUBLE_EQ(haversine_distance({50.0, 14.0}, {50.0, 14.0}), 0.0);
}

TEST(TrackMap, ChainageIsCumulativeSegmentLength) {
  const TrackMap map = fixtures::demo_track();
  const auto& v = map.vertices();
  double sum = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    sum += haversine_distance({v[i - 1].lat, v[i - 1].lon}, {v[i].lat, v[i].lon});
    EXPECT_NEAR(map.chainage()[i], sum, 1e-9);
  }
  EXPECT_NEAR(map.length(), sum, 1e-9);
  EXPECT_EQ(map.segment_count(), 4u);
}

TEST(TrackMap, Validation) {
  EXPECT_THROW(TrackMap({{50.0, 14.0, 0.0}}), ParameterError);
  EXPECT_THROW(TrackMap({{50.0, 14.0, 0.0}, {50.0, 14.0, 0.0}}), ParameterError);
  EXPECT_THROW(TrackMap({{50.0, 14.0, 0.0}, {50.1, 14.0, 0.25}}), ParameterError);
  EXPECT_THROW(TrackMap({{95.0, 14.0, 0.0}, {50.1, 14.0, 0.0}}), ParameterError);
}

TEST(TrackMap, LocalFrameRoundTrip) {
  const TrackMap map = fixtures::demo_track();
  const GeoPoint p{50.0031, 14.0017};
  const GeoPoint q = map.to_geographic(map.to_local(p));
  EXPECT_NEAR(q.lat, p.lat, 1e-12);
  EXPECT_NEAR(q.lon, p.lon, 1e-12);
}

TEST(TrackMap, VerticesProjectToTheirChainage) {
  const TrackMap map = fixtures::demo_track();
  for (std::size_t i = 0; i < map.vertices().size(); ++i) {
    const auto& v = map.vertices()[i];
    const TrackFix fix = map.project({v.lat, v.lon});
    EXPECT_NEAR(fix.chainage, map.chainage()[i], 1e-6);
    EXPECT_LT(fix.lateral_offset, 1e-6);
  }
}

TEST(TrackMap, PositionAtInvertsProjection) {
  const TrackMap map = fixtures::demo_track();
  for (double x = 0.0; x <= map.length(); x += 37.0) {
    EXPECT_NEAR(map.project(map.position_at(x)).chainage, x, 1e-6);
  }
  EXPECT_THROW(map.position_at(-1.0), RangeError);
}

TEST(TrackMap, ChainageAdvancesWithAlongTrackMotion) {
  // Central finite difference of chainage along the first segment direction.
  const TrackMap map = fixtures::demo_track();
  const auto& v = map.vertices();
  const PlanarPoint a = map.to_local({v[0].lat, v[0].lon});
  const PlanarPoint b = map.to_local({v[1].lat, v[1].lon});
  const double len = std::hypot(b.east - a.east, b.north - a.north);
  const double ue = (b.east - a.east) / len;
  const double un = (b.north - a.north) / len;
  const PlanarPoint mid{0.5 * (a.east + b.east), 0.5 * (a.north + b.north)};
  const double h = 0.5;
  const double plus = map.project(map.to_geographic({mid.east + h * ue, mid.north + h * un})).chainage;
  const double minus = map.project(map.to_geographic({mid.east - h * ue, mid.north - h * un})).chainage;
  // Planar and spherical lengths differ by the projection scale only.
  EXPECT_NEAR((plus - minus) / (2 * h), map.chainage()[1] / len, 1e-9);
  EXPECT_NEAR(map.chainage()[1] / len, 1.0, 1e-3);
}

TEST(TrackMap, OffTrackFixRejected) {
  const TrackMap map = fixtures::demo_track();
  const PlanarPoint far = map.to_local({50.0, 14.0});
  const GeoPoint fix = map.to_geographic({far.east - 40.0, far.north - 40.0});
  try {
    map.project(fix);
    FAIL() << "expected OffTrackError";
  } catch (const OffTrackError& e) {
    EXPECT_NEAR(e.lateral_offset(), std::hypot(40.0, 40.0), 1e-6);
  }
  EXPECT_NO_THROW(map.project(fix, 100.0));
}

TEST(TrackMap, BeforeStartClampsToVertexZero) {
  const TrackMap map = fixtures::demo_track();
  const PlanarPoint start = map.to_local({50.0, 14.0});
  const TrackFix fix = map.project(map.to_geographic({start.east, start.north - 10.0}));
  EXPECT_DOUBLE_EQ(fix.chainage, 0.0);
  EXPECT_EQ(fix.segment, 0u);
}

TEST(TrackMap, EquidistantFixPrefersLowerSegment) {
  // A hairpin: the fix sits on the symmetry axis between both legs.
  const TrackMap map({{50.000, 14.000, 0.0}, {50.001, 14.001, 0.0}, {50.000, 14.002, 0.0}});
  const PlanarPoint apex = map.to_local({50.001, 14.001});
  const TrackFix fix = map.closest_point(map.to_geographic({apex.east, apex.north - 50.0}));
  EXPECT_EQ(fix.segment, 0u);
  EXPECT_LT(fix.chainage, map.chainage()[1]);
}

TEST(TrackMap, SlopeInterpolation) {
  const TrackMap map = fixtures::demo_track();
  const double mid = 0.5 * (map.chainage()[0] + map.chainage()[1]);
  EXPECT_NEAR(map.slope_at(mid), 0.005, 1e-12);
  EXPECT_NEAR(slope_at(map.chainage()[3], map), -0.01, 1e-12);
  EXPECT_THROW(map.slope_at(map.length() + 1.0), RangeError);
  EXPECT_DOUBLE_EQ(map.slope_at_clamped(-5.0), 0.0);
  EXPECT_DOUBLE_EQ(map.slope_at_clamped(map.length() + 5.0), 0.0);
}

TEST(TrackIo, RoundTrip) {
  const TrackMap map = fixtures::demo_track();
  std::stringstream buf;
  write_track(buf, map);
  const TrackMap back = read_track(buf, "mem");
  ASSERT_EQ(back.vertices().size(), map.vertices().size());
  EXPECT_NEAR(back.length(), map.length(), 1e-9);
}

TEST(TrackIo, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_track(in, "track.csv");
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{9999};
  };
  EXPECT_EQ(line_of("lat,lon,slope_rad\n50,14,0\n50.1,x,0\n"), 3u);
  EXPECT_EQ(line_of("# comment\n50,14,0\n50,14\n"), 3u);
  EXPECT_EQ(line_of("50,14,0\n50,14,0\n"), 2u);
  EXPECT_EQ(line_of("50,14,0\n51,14,0.3\n"), 2u);
  EXPECT_EQ(line_of("50,14,0\n"), 0u);
}
