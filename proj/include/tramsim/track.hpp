#pragma once

// Digital track map: a geodetic polyline with per-vertex slope. Chainage is
// arc length from vertex 0 using spherical segment lengths; map matching runs
// in an equirectangular frame centred on the vertex centroid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "tramsim/csv.hpp"
#include "tramsim/error.hpp"

namespace tramsim {

inline constexpr double kEarthRadius = 6371000.0;       // m, spherical model
inline constexpr double kDefaultOffTrackGate = 25.0;    // m
inline constexpr double kMaxTrackSlope = 0.2;           // rad

struct GeoPoint {
  double lat = 0.0;  // deg
  double lon = 0.0;  // deg
};

struct TrackVertex {
  double lat = 0.0;    // deg
  double lon = 0.0;    // deg
  double slope = 0.0;  // rad, positive uphill in the chainage direction
};

struct TrackFix {
  double chainage = 0.0;        // m from vertex 0
  double lateral_offset = 0.0;  // m, distance from the fix to the matched point
  std::size_t segment = 0;
};

/// Local east/north coordinates [m].
struct PlanarPoint {
  double east = 0.0;
  double north = 0.0;
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Great-circle distance on the sphere of radius kEarthRadius.
inline double haversine_distance(GeoPoint a, GeoPoint b) {
  const double phi1 = deg_to_rad(a.lat);
  const double phi2 = deg_to_rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = deg_to_rad(b.lon - a.lon);
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

class TrackMap {
 public:
  explicit TrackMap(std::vector<TrackVertex> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw ParameterError("track needs at least 2 vertices");
    double lat_sum = 0.0;
    double lon_sum = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const auto& v = vertices_[i];
      if (!std::isfinite(v.lat) || !std::isfinite(v.lon) || std::abs(v.lat) > 90.0 ||
          std::abs(v.lon) > 180.0) {
        throw ParameterError("vertex " + std::to_string(i) + " has invalid coordinates");
      }
      if (!std::isfinite(v.slope) || std::abs(v.slope) >= kMaxTrackSlope) {
        throw ParameterError("vertex " + std::to_string(i) + " slope must satisfy |slope| < 0.2 rad");
      }
      lat_sum += v.lat;
      lon_sum += v.lon;
    }
    origin_ = {lat_sum / static_cast<double>(vertices_.size()),
               lon_sum / static_cast<double>(vertices_.size())};
    cos_origin_ = std::cos(deg_to_rad(origin_.lat));

    chainage_.assign(vertices_.size(), 0.0);
    planar_.reserve(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      planar_.push_back(to_local({vertices_[i].lat, vertices_[i].lon}));
      if (i == 0) continue;
      const double len = haversine_distance({vertices_[i - 1].lat, vertices_[i - 1].lon},
                                            {vertices_[i].lat, vertices_[i].lon});
      if (!(len > 0.0)) {
        throw ParameterError("vertices " + std::to_string(i - 1) + " and " + std::to_string(i) +
                             " are identical");
      }
      chainage_[i] = chainage_[i - 1] + len;
    }
  }

  const std::vector<TrackVertex>& vertices() const noexcept { return vertices_; }
  const std::vector<double>& chainage() const noexcept { return chainage_; }
  double length() const noexcept { return chainage_.back(); }
  std::size_t segment_count() const noexcept { return vertices_.size() - 1; }

  PlanarPoint to_local(GeoPoint p) const {
    return {kEarthRadius * cos_origin_ * deg_to_rad(p.lon - origin_.lon),
            kEarthRadius * deg_to_rad(p.lat - origin_.lat)};
  }

  GeoPoint to_geographic(PlanarPoint p) const {
    return {origin_.lat + rad_to_deg(p.north / kEarthRadius),
            origin_.lon + rad_to_deg(p.east / (kEarthRadius * cos_origin_))};
  }

  /// Nearest point on the polyline, without the off-track gate.
  /// Ties go to the lowest segment index.
  TrackFix closest_point(GeoPoint fix) const {
    const PlanarPoint p = to_local(fix);
    TrackFix best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < planar_.size(); ++k) {
      const PlanarPoint& a = planar_[k];
      const PlanarPoint& b = planar_[k + 1];
      const double de = b.east - a.east;
      const double dn = b.north - a.north;
      const double len2 = de * de + dn * dn;
      double t = ((p.east - a.east) * de + (p.north - a.north) * dn) / len2;
      t = std::clamp(t, 0.0, 1.0);
      const double ce = a.east + t * de - p.east;
      const double cn = a.north + t * dn - p.north;
      const double dist = std::hypot(ce, cn);
      if (dist < best_dist) {
        best_dist = dist;
        best.segment = k;
        best.lateral_offset = dist;
        best.chainage = chainage_[k] + t * (chainage_[k + 1] - chainage_[k]);
      }
    }
    return best;
  }

  /// Map-matches a fix; rejects it when it lies more than `gate` metres away.
  TrackFix project(GeoPoint fix, double gate = kDefaultOffTrackGate) const {
    TrackFix out = closest_point(fix);
    if (out.lateral_offset > gate) {
      throw OffTrackError("fix is " + std::to_string(out.lateral_offset) +
                              " m from the track (gate " + std::to_string(gate) + " m)",
                          out.lateral_offset);
    }
    return out;
  }

  /// Linearly interpolated slope at chainage x in [0, length()].
  double slope_at(double x) const {
    require_on_track(x);
    const std::size_t k = segment_containing(x);
    const double t = (x - chainage_[k]) / (chainage_[k + 1] - chainage_[k]);
    return vertices_[k].slope + t * (vertices_[k + 1].slope - vertices_[k].slope);
  }

  /// As slope_at, holding the end-vertex slopes beyond either end of the track.
  double slope_at_clamped(double x) const { return slope_at(std::clamp(x, 0.0, length())); }

  /// Geographic image of chainage x (inverse of the projection on the polyline).
  GeoPoint position_at(double x) const {
    require_on_track(x);
    const std::size_t k = segment_containing(x);
    const double t = (x - chainage_[k]) / (chainage_[k + 1] - chainage_[k]);
    const PlanarPoint& a = planar_[k];
    const PlanarPoint& b = planar_[k + 1];
    return to_geographic({a.east + t * (b.east - a.east), a.north + t * (b.north - a.north)});
  }

 private:
  void require_on_track(double x) const {
    if (!(x >= 0.0 && x <= length())) {
      throw RangeError("chainage " + std::to_string(x) + " m outside track [0, " +
                       std::to_string(length()) + "] m");
    }
  }

  std::size_t segment_containing(double x) const {
    const auto it = std::upper_bound(chainage_.begin(), chainage_.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(chainage_.begin(), it));
    return std::min(idx == 0 ? 0 : idx - 1, vertices_.size() - 2);
  }

  std::vector<TrackVertex> vertices_;
  std::vector<double> chainage_;
  std::vector<PlanarPoint> planar_;
  GeoPoint origin_;
  double cos_origin_ = 1.0;
};

inline TrackFix project_to_track(GeoPoint fix, const TrackMap& map,
                                 double gate = kDefaultOffTrackGate) {
  return map.project(fix, gate);
}

inline double slope_at(double x, const TrackMap& map) { return map.slope_at(x); }

/// Track CSV: `lat,lon,slope_rad` per line, `#` comments, optional header.
inline TrackMap read_track(std::istream& in, const std::string& source) {
  std::vector<TrackVertex> vertices;
  csv::for_each_row(in, "lat", [&](const auto& fields, std::size_t line) {
    if (fields.size() != 3) throw ParseError(source, line, "expected 3 fields 'lat,lon,slope_rad'");
    TrackVertex v{csv::parse_double(fields[0], source, line, "latitude"),
                  csv::parse_double(fields[1], source, line, "longitude"),
                  csv::parse_double(fields[2], source, line, "slope")};
    if (std::abs(v.lat) > 90.0 || std::abs(v.lon) > 180.0) {
      throw ParseError(source, line, "coordinates out of range");
    }
    if (std::abs(v.slope) >= kMaxTrackSlope) {
      throw ParseError(source, line, "slope must satisfy |slope| < 0.2 rad");
    }
    if (!vertices.empty() && vertices.back().lat == v.lat && vertices.back().lon == v.lon) {
      throw ParseError(source, line, "duplicate consecutive vertex");
    }
    vertices.push_back(v);
  });
  if (vertices.size() < 2) {
    throw ParseError(source, 0,
                     "track needs at least 2 vertices, found " + std::to_string(vertices.size()));
  }
  try {
    return TrackMap(std::move(vertices));
  } catch (const ParameterError& e) {
    throw ParseError(source, 0, e.what());
  }
}

inline TrackMap load_track(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open track file");
  return read_track(in, path);
}

inline void write_track(std::ostream& out, const TrackMap& map) {
  out << "lat,lon,slope_rad\n";
  for (const auto& v : map.vertices()) csv::write_row(out, {v.lat, v.lon, v.slope});
}

inline void save_track(const std::string& path, const TrackMap& map) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot write track file");
  write_track(out, map);
}

}  // namespace tramsim
