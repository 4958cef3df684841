#include "roadq/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roadq {

std::optional<AnomalyType> anomaly_type_from_string(std::string_view s) {
  if (s == "pothole") return AnomalyType::Pothole;
  if (s == "crack") return AnomalyType::Crack;
  if (s == "manhole") return AnomalyType::Manhole;
  if (s == "speed_bump") return AnomalyType::SpeedBump;
  if (s == "rough_patch") return AnomalyType::RoughPatch;
  return std::nullopt;
}

std::optional<Severity> severity_from_string(std::string_view s) {
  if (s == "mild") return Severity::Mild;
  if (s == "moderate") return Severity::Moderate;
  if (s == "severe") return Severity::Severe;
  return std::nullopt;
}

std::string_view to_string(AnomalyType t) {
  switch (t) {
    case AnomalyType::Pothole: return "pothole";
    case AnomalyType::Crack: return "crack";
    case AnomalyType::Manhole: return "manhole";
    case AnomalyType::SpeedBump: return "speed_bump";
    case AnomalyType::RoughPatch: return "rough_patch";
  }
  return "pothole";
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Mild: return "mild";
    case Severity::Moderate: return "moderate";
    case Severity::Severe: return "severe";
  }
  return "mild";
}

std::span<const AnomalyRecord> StoreSnapshot::for_segment(SegmentId id) const {
  if (!records) return {};
  auto it = records->find(id);
  if (it == records->end()) return {};
  return it->second;
}

void RoadNetwork::add_node(RoadNode node) {
  if (!geo::valid_coordinates(node.pos)) {
    throw std::invalid_argument("add_node: coordinates out of range");
  }
  if (!nodes_.emplace(node.id, node).second) {
    throw std::invalid_argument("add_node: duplicate node id " + std::to_string(node.id));
  }
}

void RoadNetwork::add_segment(RoadSegment segment, std::optional<double> expected_length_m) {
  if (segment.polyline.size() < 2) {
    throw std::invalid_argument("add_segment: polyline needs >= 2 points");
  }
  if (segment.lanes < 1) {
    throw std::invalid_argument("add_segment: lanes must be >= 1");
  }
  if (!(segment.speed_kmh > 0.0)) {
    throw std::invalid_argument("add_segment: speed_kmh must be positive");
  }
  if (nodes_.find(segment.from) == nodes_.end() || nodes_.find(segment.to) == nodes_.end()) {
    throw std::invalid_argument("add_segment: endpoint node missing for segment " +
                                std::to_string(segment.id));
  }
  segment.length_m = geo::polyline_length_m(segment.polyline);
  if (!(segment.length_m > 0.0)) {
    throw std::invalid_argument("add_segment: zero-length polyline");
  }
  if (expected_length_m.has_value()) {
    const double rel = std::abs(*expected_length_m - segment.length_m) / segment.length_m;
    if (rel > 0.001) {
      throw std::invalid_argument("add_segment: declared length_m deviates more than 0.1% "
                                  "from polyline length for segment " +
                                  std::to_string(segment.id));
    }
  }
  const SegmentId id = segment.id;
  const NodeId from = segment.from;
  if (!segments_.emplace(id, std::move(segment)).second) {
    throw std::invalid_argument("add_segment: duplicate segment id " + std::to_string(id));
  }
  auto& out = outgoing_[from];
  out.insert(std::lower_bound(out.begin(), out.end(), id), id);
}

const RoadSegment* RoadNetwork::find_segment(SegmentId id) const {
  auto it = segments_.find(id);
  return it == segments_.end() ? nullptr : &it->second;
}

const RoadNode* RoadNetwork::find_node(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::span<const SegmentId> RoadNetwork::outgoing(NodeId id) const {
  auto it = outgoing_.find(id);
  if (it == outgoing_.end()) return {};
  return it->second;
}

std::optional<SegmentId> RoadNetwork::map_match(const geo::LatLon& p,
                                                double threshold_m) const {
  if (!geo::valid_coordinates(p)) {
    throw std::invalid_argument("map_match: coordinates out of range");
  }
  std::optional<SegmentId> best;
  double best_dist = 0.0;
  for (const auto& [id, seg] : segments_) {  // ascending id: ties keep the first
    const double d = geo::point_polyline_distance_m(p, seg.polyline);
    if (d <= threshold_m && (!best || d < best_dist)) {
      best = id;
      best_dist = d;
    }
  }
  return best;
}

AttachResult RoadNetwork::attach_anomaly(const AnomalyObservation& obs,
                                         double threshold_m) {
  if (auto it = seen_reports_.find(obs.report_id); it != seen_reports_.end()) {
    return {AttachOutcome::Duplicate, std::nullopt};
  }
  const std::optional<SegmentId> match = map_match(obs.pos, threshold_m);
  if (!match) {
    return {AttachOutcome::Unmatched, std::nullopt};
  }
  AnomalyRecord rec;
  rec.report_id = obs.report_id;
  rec.segment_id = *match;
  rec.type = obs.type;
  rec.severity = obs.severity;
  rec.timestamp = obs.timestamp;
  rec.timestamp_s = obs.timestamp_s;
  rec.pos = obs.pos;
  rec.distance_to_segment_m =
      geo::point_polyline_distance_m(obs.pos, segments_.at(*match).polyline);

  // copy-on-write so existing snapshots stay consistent
  auto next = std::make_shared<AnomalyStore>(*store_);
  (*next)[*match].push_back(rec);
  store_ = std::move(next);
  ++version_;
  seen_reports_.emplace(obs.report_id, *match);
  return {AttachOutcome::Stored, rec};
}

StoreSnapshot RoadNetwork::snapshot() const { return {version_, store_}; }

}  // namespace roadq
