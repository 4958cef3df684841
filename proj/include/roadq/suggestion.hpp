#pragma once

#include <span>
#include <string>
#include <vector>

#include "roadq/fuzzy.hpp"

namespace roadq {

struct RouteMetrics {
  double avg_quality = 0.0;  // [0, 1]
  double time_ratio = 1.0;   // route time / fastest candidate's time
  double dist_ratio = 1.0;   // route length / shortest candidate's length
  double time_min = 0.0;     // raw values kept for reporting
  double length_km = 0.0;
};

struct RouteRecommendation {
  int route_id = 0;
  double score = 0.0;
  std::string level;  // NotSuggested / MarginallySuggested / Suggested
  int rank = 0;       // 1-based, descending score
  RouteMetrics metrics;
};

// Scores for label-only fixtures (quality labels without crisp scores).
struct LabelScores {
  double good = 0.85;
  double moderate = 0.5;
  double poor = 0.15;

  double of(std::string_view label) const;  // throws on unknown label
};

// Unweighted mean of per-segment quality scores. Empty input throws.
double route_quality_average(std::span<const double> scores);
double route_quality_average(std::span<const std::string> labels,
                             const LabelScores& map);

// time_ratio_i = t_i / min_j t_j and dist_ratio_i = d_i / min_j d_j.
// Non-positive times or lengths throw.
struct TimeDistance {
  double time_min = 0.0;
  double length_km = 0.0;
};
std::vector<RouteMetrics> normalize_candidates(std::span<const TimeDistance> candidates);

struct RouteInput {
  int route_id = 0;
  RouteMetrics metrics;
};

// Per-route fuzzify/infer/defuzzify/classify, ranked by descending score.
// Ties: higher avg_quality, then lower time_ratio, lower dist_ratio, lower id.
std::vector<RouteRecommendation> suggest_routes(std::span<const RouteInput> routes,
                                                const fuzzy::FisDefinition& fis);

}  // namespace roadq
