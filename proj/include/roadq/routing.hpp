#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "roadq/assessment.hpp"
#include "roadq/network.hpp"

namespace roadq {

enum class Weight { Time, Distance };

struct RouteCandidate {
  int id = 0;
  std::vector<SegmentId> segments;
  enum class Source { Internal, Imported } source = Source::Internal;
  double time_min = 0.0;
  double length_km = 0.0;
};

// Dijkstra over nonnegative edge weights. Equal-cost ties prefer fewer edges,
// then the lexicographically smaller segment-id sequence. src == dst yields
// an empty path of cost 0. Unreachable dst yields nullopt. Unknown nodes
// throw std::invalid_argument.
std::optional<RouteCandidate> shortest_path(const RoadNetwork& network,
                                            NodeId src, NodeId dst, Weight weight);

// Yen's k-shortest loopless paths, sorted by (cost, edges, segment-id
// sequence). Returns fewer than k when fewer exist.
std::vector<RouteCandidate> k_shortest(const RoadNetwork& network, NodeId src,
                                       NodeId dst, int k, Weight weight);

struct RouteTotals {
  double time_min = 0.0;
  double length_km = 0.0;
  double avg_quality = 0.0;
};

// Free-flow travel time, total length, and mean assessed quality over the
// candidate's segments. Throws std::invalid_argument on an empty candidate or
// a segment without an assessment.
RouteTotals route_metrics(const RouteCandidate& candidate,
                          const RoadNetwork& network,
                          const std::map<SegmentId, SegmentAssessment>& assessments);

double segment_travel_min(const RoadSegment& s);
double path_cost(const RoadNetwork& network, std::span<const SegmentId> segments,
                 Weight weight);

}  // namespace roadq
