#pragma once

#include <span>
#include <vector>

namespace roadq::geo {

// Mean Earth radius used for all great-circle math in this project.
inline constexpr double kEarthRadiusM = 6371000.0;

struct LatLon {
  double lat = 0.0;  // WGS-84 degrees, [-90, 90]
  double lon = 0.0;  // WGS-84 degrees, [-180, 180]
};

bool valid_coordinates(const LatLon& p);

// Great-circle distance in meters. Throws std::invalid_argument on
// out-of-range or non-finite coordinates.
double haversine_m(const LatLon& a, const LatLon& b);

// Distance from p to the segment a-b: perpendicular foot via an
// equirectangular local projection, final distance by haversine.
double point_segment_distance_m(const LatLon& p, const LatLon& a, const LatLon& b);

// Minimum of point_segment_distance_m over the polyline's edges.
// Polyline must have at least 2 points.
double point_polyline_distance_m(const LatLon& p, std::span<const LatLon> polyline);

// Sum of haversine leg lengths.
double polyline_length_m(std::span<const LatLon> polyline);

// Point displaced the given meters north/east; small-offset helper used by
// tests and fixture tooling.
LatLon offset_m(const LatLon& p, double north_m, double east_m);

}  // namespace roadq::geo
