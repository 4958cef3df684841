#include "roadq/suggestion.hpp"

#include <algorithm>
#include <stdexcept>

namespace roadq {

double LabelScores::of(std::string_view label) const {
  if (label == "Good") return good;
  if (label == "Moderate") return moderate;
  if (label == "Poor") return poor;
  throw std::invalid_argument("LabelScores: unknown label '" + std::string(label) + "'");
}

double route_quality_average(std::span<const double> scores) {
  if (scores.empty()) {
    throw std::invalid_argument("route_quality_average: empty route");
  }
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

double route_quality_average(std::span<const std::string> labels, const LabelScores& map) {
  if (labels.empty()) {
    throw std::invalid_argument("route_quality_average: empty route");
  }
  double sum = 0.0;
  for (const std::string& l : labels) sum += map.of(l);
  return sum / static_cast<double>(labels.size());
}

std::vector<RouteMetrics> normalize_candidates(std::span<const TimeDistance> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("normalize_candidates: no candidates");
  }
  double min_t = candidates[0].time_min;
  double min_d = candidates[0].length_km;
  for (const TimeDistance& c : candidates) {
    if (!(c.time_min > 0.0) || !(c.length_km > 0.0)) {
      throw std::invalid_argument("normalize_candidates: non-positive time or length");
    }
    min_t = std::min(min_t, c.time_min);
    min_d = std::min(min_d, c.length_km);
  }
  std::vector<RouteMetrics> out;
  out.reserve(candidates.size());
  for (const TimeDistance& c : candidates) {
    RouteMetrics m;
    m.time_ratio = c.time_min / min_t;
    m.dist_ratio = c.length_km / min_d;
    m.time_min = c.time_min;
    m.length_km = c.length_km;
    out.push_back(m);
  }
  return out;
}

std::vector<RouteRecommendation> suggest_routes(std::span<const RouteInput> routes,
                                                const fuzzy::FisDefinition& fis) {
  if (routes.empty()) {
    throw std::invalid_argument("suggest_routes: no routes");
  }
  std::vector<RouteRecommendation> out;
  out.reserve(routes.size());
  for (const RouteInput& r : routes) {
    const std::map<std::string, double> inputs = {
        {"avg_quality", r.metrics.avg_quality},
        {"time_ratio", r.metrics.time_ratio},
        {"dist_ratio", r.metrics.dist_ratio},
    };
    const double score = fuzzy::defuzzify_centroid(fuzzy::infer(fis, inputs));
    RouteRecommendation rec;
    rec.route_id = r.route_id;
    rec.score = score;
    rec.level = fuzzy::classify(fis, score);
    rec.metrics = r.metrics;
    out.push_back(std::move(rec));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RouteRecommendation& a, const RouteRecommendation& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.metrics.avg_quality != b.metrics.avg_quality) {
                       return a.metrics.avg_quality > b.metrics.avg_quality;
                     }
                     if (a.metrics.time_ratio != b.metrics.time_ratio) {
                       return a.metrics.time_ratio < b.metrics.time_ratio;
                     }
                     if (a.metrics.dist_ratio != b.metrics.dist_ratio) {
                       return a.metrics.dist_ratio < b.metrics.dist_ratio;
                     }
                     return a.route_id < b.route_id;
                   });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rank = static_cast<int>(i) + 1;
  }
  return out;
}

}  // namespace roadq
