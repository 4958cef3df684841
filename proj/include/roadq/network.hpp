#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roadq/geo.hpp"

namespace roadq {

using NodeId = std::int64_t;
using SegmentId = std::int64_t;

inline constexpr double kDefaultMatchThresholdM = 15.0;

struct RoadNode {
  NodeId id = 0;
  geo::LatLon pos;
};

struct RoadSegment {
  SegmentId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  std::vector<geo::LatLon> polyline;  // includes both endpoints
  int lanes = 1;
  double speed_kmh = 0.0;
  double length_m = 0.0;  // always the haversine polyline length
};

enum class AnomalyType { Pothole, Crack, Manhole, SpeedBump, RoughPatch };
enum class Severity { Mild, Moderate, Severe };

std::optional<AnomalyType> anomaly_type_from_string(std::string_view s);
std::optional<Severity> severity_from_string(std::string_view s);
std::string_view to_string(AnomalyType t);
std::string_view to_string(Severity s);

// One crowdsensed detection, ready to be attached to the network.
struct AnomalyObservation {
  std::string report_id;
  geo::LatLon pos;
  AnomalyType type = AnomalyType::Pothole;
  Severity severity = Severity::Mild;
  std::string timestamp;       // ISO-8601 UTC
  std::int64_t timestamp_s = 0;  // seconds since epoch
};

// A stored, map-matched anomaly.
struct AnomalyRecord {
  std::string report_id;
  SegmentId segment_id = 0;
  AnomalyType type = AnomalyType::Pothole;
  Severity severity = Severity::Mild;
  std::string timestamp;
  std::int64_t timestamp_s = 0;
  geo::LatLon pos;
  double distance_to_segment_m = 0.0;
};

using AnomalyStore = std::map<SegmentId, std::vector<AnomalyRecord>>;

// Immutable view of the anomaly store at one version. Readers holding a
// snapshot never observe later attaches.
struct StoreSnapshot {
  std::uint64_t version = 0;
  std::shared_ptr<const AnomalyStore> records;

  std::span<const AnomalyRecord> for_segment(SegmentId id) const;
};

enum class AttachOutcome { Stored, Unmatched, Duplicate };

struct AttachResult {
  AttachOutcome outcome = AttachOutcome::Unmatched;
  std::optional<AnomalyRecord> record;
};

// Directed road graph with per-segment anomaly store. Topology is fixed after
// loading; anomaly attaches are serialized (single writer) and publish
// copy-on-write snapshots for readers.
class RoadNetwork {
 public:
  void add_node(RoadNode node);
  // Computes length_m from the polyline. If expected_length_m is given it
  // must agree within 0.1%.
  void add_segment(RoadSegment segment,
                   std::optional<double> expected_length_m = std::nullopt);

  const std::map<NodeId, RoadNode>& nodes() const { return nodes_; }
  const std::map<SegmentId, RoadSegment>& segments() const { return segments_; }
  const RoadSegment* find_segment(SegmentId id) const;
  const RoadNode* find_node(NodeId id) const;
  // Outgoing segments per node, segment-id order.
  std::span<const SegmentId> outgoing(NodeId id) const;

  // Nearest segment within threshold; ties broken by lowest segment id.
  std::optional<SegmentId> map_match(const geo::LatLon& p,
                                     double threshold_m = kDefaultMatchThresholdM) const;

  AttachResult attach_anomaly(const AnomalyObservation& obs,
                              double threshold_m = kDefaultMatchThresholdM);

  StoreSnapshot snapshot() const;

 private:
  std::map<NodeId, RoadNode> nodes_;
  std::map<SegmentId, RoadSegment> segments_;
  std::map<NodeId, std::vector<SegmentId>> outgoing_;
  std::shared_ptr<const AnomalyStore> store_ = std::make_shared<AnomalyStore>();
  std::uint64_t version_ = 0;
  std::map<std::string, SegmentId> seen_reports_;
};

}  // namespace roadq
