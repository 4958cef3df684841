#include "roadq/assessment.hpp"

#include <stdexcept>

#include "roadq/errors.hpp"

namespace roadq {

namespace {

double severity_weight(Severity s) {
  switch (s) {
    case Severity::Mild: return 1.0 / 3.0;
    case Severity::Moderate: return 2.0 / 3.0;
    case Severity::Severe: return 1.0;
  }
  return 1.0 / 3.0;
}

}  // namespace

double anomaly_density(const RoadSegment& segment, std::span<const AnomalyRecord> records,
                       double dmax_per_km) {
  if (!(segment.length_m > 0.0)) {
    throw std::invalid_argument("anomaly_density: segment length must be positive");
  }
  if (!(dmax_per_km > 0.0)) {
    throw std::invalid_argument("anomaly_density: density cap must be positive");
  }
  const double per_km = static_cast<double>(records.size()) / (segment.length_m / 1000.0);
  const double ra = per_km / dmax_per_km;
  return ra > 1.0 ? 1.0 : ra;
}

double severity_index(std::span<const AnomalyRecord> records) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const AnomalyRecord& r : records) sum += severity_weight(r.severity);
  return sum / static_cast<double>(records.size());
}

SegmentAssessment assess_segment(SegmentId id, const SegmentFeatures& features,
                                 const fuzzy::FisDefinition& fis,
                                 std::vector<fuzzy::ClampEvent>* clamp_log) {
  const std::map<std::string, double> inputs = {
      {"ra", features.ra},
      {"severity", features.severity_index},
      {"lanes", features.lanes},
  };
  const fuzzy::AggregatedOutput agg = fuzzy::infer(fis, inputs, clamp_log);
  const double score = fuzzy::defuzzify_centroid(agg);

  SegmentAssessment a;
  a.segment_id = id;
  a.quality_score = score;
  a.label = fuzzy::classify(fis, score);
  a.features = features;
  a.fis_fingerprint = fis.fingerprint();
  return a;
}

std::map<SegmentId, SegmentAssessment> assess_network(const RoadNetwork& network,
                                                      const StoreSnapshot& snapshot,
                                                      const fuzzy::FisDefinition& fis,
                                                      double dmax_per_km,
                                                      std::vector<fuzzy::ClampEvent>* clamp_log) {
  std::map<SegmentId, SegmentAssessment> out;
  for (const auto& [id, seg] : network.segments()) {
    const std::span<const AnomalyRecord> records = snapshot.for_segment(id);
    SegmentFeatures f;
    f.ra = anomaly_density(seg, records, dmax_per_km);
    f.severity_index = severity_index(records);
    f.lanes = static_cast<double>(seg.lanes);
    out.emplace(id, assess_segment(id, f, fis, clamp_log));
  }
  return out;
}

}  // namespace roadq
