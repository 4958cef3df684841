#include "roadq/routing.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include "roadq/suggestion.hpp"

namespace roadq {

double segment_travel_min(const RoadSegment& s) {
  return (s.length_m / 1000.0) / s.speed_kmh * 60.0;
}

namespace {

double edge_cost(const RoadSegment& s, Weight w) {
  return w == Weight::Time ? segment_travel_min(s) : s.length_m / 1000.0;
}

// (cost, edge count, segment-id sequence) composite order
struct PathLabel {
  double cost = 0.0;
  std::vector<SegmentId> segments;

  bool better_than(const PathLabel& other) const {
    if (cost != other.cost) return cost < other.cost;
    if (segments.size() != other.segments.size()) {
      return segments.size() < other.segments.size();
    }
    return segments < other.segments;
  }
};

struct QueueEntry {
  PathLabel label;
  NodeId node = 0;
};

struct QueueCmp {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    // priority_queue keeps the largest on top; invert
    return b.label.better_than(a.label);
  }
};

std::optional<PathLabel> dijkstra(const RoadNetwork& net, NodeId src, NodeId dst,
                                  Weight weight, const std::set<NodeId>& banned_nodes,
                                  const std::set<SegmentId>& banned_segments) {
  if (src == dst) return PathLabel{};
  std::map<NodeId, PathLabel> best;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueCmp> queue;
  std::set<NodeId> done;
  queue.push({PathLabel{}, src});
  while (!queue.empty()) {
    QueueEntry top = queue.top();
    queue.pop();
    if (done.count(top.node)) continue;
    done.insert(top.node);
    if (top.node == dst) return top.label;
    for (SegmentId sid : net.outgoing(top.node)) {
      if (banned_segments.count(sid)) continue;
      const RoadSegment& seg = *net.find_segment(sid);
      if (banned_nodes.count(seg.to)) continue;
      if (done.count(seg.to)) continue;
      PathLabel next;
      next.cost = top.label.cost + edge_cost(seg, weight);
      next.segments = top.label.segments;
      next.segments.push_back(sid);
      auto it = best.find(seg.to);
      if (it == best.end() || next.better_than(it->second)) {
        best[seg.to] = next;
        queue.push({std::move(next), seg.to});
      }
    }
  }
  return std::nullopt;
}

std::vector<NodeId> node_sequence(const RoadNetwork& net, NodeId src,
                                  std::span<const SegmentId> segments) {
  std::vector<NodeId> nodes{src};
  for (SegmentId sid : segments) {
    nodes.push_back(net.find_segment(sid)->to);
  }
  return nodes;
}

RouteCandidate to_candidate(const RoadNetwork& net, const PathLabel& label, int id) {
  RouteCandidate c;
  c.id = id;
  c.segments = label.segments;
  c.source = RouteCandidate::Source::Internal;
  for (SegmentId sid : label.segments) {
    const RoadSegment& seg = *net.find_segment(sid);
    c.time_min += segment_travel_min(seg);
    c.length_km += seg.length_m / 1000.0;
  }
  return c;
}

void require_node(const RoadNetwork& net, NodeId id, const char* what) {
  if (net.find_node(id) == nullptr) {
    throw std::invalid_argument(std::string(what) + ": unknown node " + std::to_string(id));
  }
}

}  // namespace

double path_cost(const RoadNetwork& network, std::span<const SegmentId> segments,
                 Weight weight) {
  double cost = 0.0;
  for (SegmentId sid : segments) {
    const RoadSegment* seg = network.find_segment(sid);
    if (seg == nullptr) {
      throw std::invalid_argument("path_cost: unknown segment " + std::to_string(sid));
    }
    cost += edge_cost(*seg, weight);
  }
  return cost;
}

std::optional<RouteCandidate> shortest_path(const RoadNetwork& network, NodeId src,
                                            NodeId dst, Weight weight) {
  require_node(network, src, "shortest_path");
  require_node(network, dst, "shortest_path");
  auto label = dijkstra(network, src, dst, weight, {}, {});
  if (!label) return std::nullopt;
  return to_candidate(network, *label, 1);
}

std::vector<RouteCandidate> k_shortest(const RoadNetwork& network, NodeId src, NodeId dst,
                                       int k, Weight weight) {
  if (k < 1) throw std::invalid_argument("k_shortest: k must be >= 1");
  require_node(network, src, "k_shortest");
  require_node(network, dst, "k_shortest");

  std::vector<PathLabel> accepted;
  auto first = dijkstra(network, src, dst, weight, {}, {});
  if (!first) return {};
  accepted.push_back(*first);

  auto label_less = [](const PathLabel& a, const PathLabel& b) {
    return a.better_than(b);
  };
  std::vector<PathLabel> candidates;  // kept sorted, best first

  while (static_cast<int>(accepted.size()) < k) {
    const PathLabel& prev = accepted.back();
    const std::vector<NodeId> prev_nodes = node_sequence(network, src, prev.segments);

    for (std::size_t i = 0; i < prev.segments.size(); ++i) {
      const NodeId spur_node = prev_nodes[i];
      const std::vector<SegmentId> root(prev.segments.begin(),
                                        prev.segments.begin() + static_cast<long>(i));

      std::set<SegmentId> banned_segments;
      for (const PathLabel& p : accepted) {
        if (p.segments.size() > i &&
            std::equal(root.begin(), root.end(), p.segments.begin())) {
          banned_segments.insert(p.segments[i]);
        }
      }
      for (const PathLabel& p : candidates) {
        if (p.segments.size() > i &&
            std::equal(root.begin(), root.end(), p.segments.begin())) {
          banned_segments.insert(p.segments[i]);
        }
      }
      std::set<NodeId> banned_nodes(prev_nodes.begin(),
                                    prev_nodes.begin() + static_cast<long>(i));

      auto spur = dijkstra(network, spur_node, dst, weight, banned_nodes, banned_segments);
      if (!spur) continue;

      PathLabel total;
      total.segments = root;
      total.segments.insert(total.segments.end(), spur->segments.begin(),
                            spur->segments.end());
      total.cost = path_cost(network, total.segments, weight);

      const auto same = [&total](const PathLabel& p) { return p.segments == total.segments; };
      if (std::any_of(accepted.begin(), accepted.end(), same) ||
          std::any_of(candidates.begin(), candidates.end(), same)) {
        continue;
      }
      candidates.insert(
          std::upper_bound(candidates.begin(), candidates.end(), total, label_less),
          std::move(total));
    }

    if (candidates.empty()) break;
    accepted.push_back(candidates.front());
    candidates.erase(candidates.begin());
  }

  std::sort(accepted.begin(), accepted.end(), label_less);
  std::vector<RouteCandidate> out;
  out.reserve(accepted.size());
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    out.push_back(to_candidate(network, accepted[i], static_cast<int>(i) + 1));
  }
  return out;
}

RouteTotals route_metrics(const RouteCandidate& candidate, const RoadNetwork& network,
                          const std::map<SegmentId, SegmentAssessment>& assessments) {
  if (candidate.segments.empty()) {
    throw std::invalid_argument("route_metrics: empty candidate");
  }
  RouteTotals totals;
  std::vector<double> scores;
  scores.reserve(candidate.segments.size());
  for (SegmentId sid : candidate.segments) {
    const RoadSegment* seg = network.find_segment(sid);
    if (seg == nullptr) {
      throw std::invalid_argument("route_metrics: unknown segment " + std::to_string(sid));
    }
    auto it = assessments.find(sid);
    if (it == assessments.end()) {
      throw std::invalid_argument("route_metrics: segment " + std::to_string(sid) +
                                  " has no assessment");
    }
    totals.time_min += segment_travel_min(*seg);
    totals.length_km += seg->length_m / 1000.0;
    scores.push_back(it->second.quality_score);
  }
  totals.avg_quality = route_quality_average(scores);
  return totals;
}

}  // namespace roadq
