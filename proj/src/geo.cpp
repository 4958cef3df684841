#include "roadq/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roadq::geo {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

bool valid_coordinates(const LatLon& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) &&
         p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

double haversine_m(const LatLon& a, const LatLon& b) {
  if (!valid_coordinates(a) || !valid_coordinates(b)) {
    throw std::invalid_argument("haversine_m: coordinates out of range");
  }
  const double p1 = a.lat * kDegToRad;
  const double p2 = b.lat * kDegToRad;
  const double dp = (b.lat - a.lat) * kDegToRad;
  const double dl = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dp / 2.0);
  const double s2 = std::sin(dl / 2.0);
  const double h = s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double point_segment_distance_m(const LatLon& p, const LatLon& a, const LatLon& b) {
  if (!valid_coordinates(p) || !valid_coordinates(a) || !valid_coordinates(b)) {
    throw std::invalid_argument("point_segment_distance_m: coordinates out of range");
  }
  // Equirectangular plane centered between the endpoints; adequate at street
  // extents. The foot of the perpendicular is clamped to the segment.
  const double lat0 = 0.5 * (a.lat + b.lat) * kDegToRad;
  const double c = std::cos(lat0);
  const double ax = a.lon * kDegToRad * c, ay = a.lat * kDegToRad;
  const double bx = b.lon * kDegToRad * c, by = b.lat * kDegToRad;
  const double px = p.lon * kDegToRad * c, py = p.lat * kDegToRad;
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
  }
  const LatLon foot{(ay + t * dy) / kDegToRad, (ax + t * dx) / (kDegToRad * c)};
  return haversine_m(p, foot);
}

double point_polyline_distance_m(const LatLon& p, std::span<const LatLon> polyline) {
  if (polyline.size() < 2) {
    throw std::invalid_argument("point_polyline_distance_m: polyline needs >= 2 points");
  }
  double best = point_segment_distance_m(p, polyline[0], polyline[1]);
  for (std::size_t i = 2; i < polyline.size(); ++i) {
    best = std::min(best, point_segment_distance_m(p, polyline[i - 1], polyline[i]));
  }
  return best;
}

double polyline_length_m(std::span<const LatLon> polyline) {
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    total += haversine_m(polyline[i - 1], polyline[i]);
  }
  return total;
}

LatLon offset_m(const LatLon& p, double north_m, double east_m) {
  const double dlat = north_m / kEarthRadiusM / kDegToRad;
  const double dlon = east_m / (kEarthRadiusM * std::cos(p.lat * kDegToRad)) / kDegToRad;
  return {p.lat + dlat, p.lon + dlon};
}

}  // namespace roadq::geo
