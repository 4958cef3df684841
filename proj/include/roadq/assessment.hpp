#pragma once

#include <map>
#include <span>
#include <string>

#include "roadq/fuzzy.hpp"
#include "roadq/network.hpp"

namespace roadq {

inline constexpr double kDefaultDensityCapPerKm = 40.0;

struct SegmentFeatures {
  double ra = 0.0;              // normalized anomaly density, [0, 1]
  double severity_index = 0.0;  // mean severity weight, [0, 1]
  double lanes = 1.0;
};

struct SegmentAssessment {
  SegmentId segment_id = 0;
  double quality_score = 0.0;  // [0, 1]
  std::string label;           // Poor / Moderate / Good
  SegmentFeatures features;
  std::uint64_t fis_fingerprint = 0;
};

// count / (length_m / 1000) anomalies per km, normalized by dmax_per_km and
// clamped to 1. Throws std::invalid_argument on a non-positive length.
double anomaly_density(const RoadSegment& segment,
                       std::span<const AnomalyRecord> records,
                       double dmax_per_km = kDefaultDensityCapPerKm);

// Mean of {mild: 1/3, moderate: 2/3, severe: 1}; empty input gives 0.
double severity_index(std::span<const AnomalyRecord> records);

// fuzzify -> infer -> centroid -> classify through the given FIS.
// Out-of-universe inputs (e.g. a five-lane road against a [1,4] universe) are
// clamped by the engine; pass a clamp log to observe them.
SegmentAssessment assess_segment(SegmentId id, const SegmentFeatures& features,
                                 const fuzzy::FisDefinition& fis,
                                 std::vector<fuzzy::ClampEvent>* clamp_log = nullptr);

// Assessment for every segment in the snapshot; segments without anomalies
// are assessed with (ra=0, severity=0).
std::map<SegmentId, SegmentAssessment> assess_network(
    const RoadNetwork& network, const StoreSnapshot& snapshot,
    const fuzzy::FisDefinition& fis,
    double dmax_per_km = kDefaultDensityCapPerKm,
    std::vector<fuzzy::ClampEvent>* clamp_log = nullptr);

}  // namespace roadq
