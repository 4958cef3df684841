#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadq/assessment.hpp"
#include "roadq/fuzzy.hpp"
#include "roadq/network.hpp"
#include "roadq/routing.hpp"
#include "roadq/suggestion.hpp"

namespace roadq::io {

inline constexpr int kSchemaVersion = 1;

// ------------------------------------------------------------------ reports

struct RawReport {
  std::string device_id;
  std::string timestamp;  // ISO-8601 UTC, e.g. 2025-06-10T08:01:02Z
  std::int64_t timestamp_s = 0;
  double lat = 0.0;
  double lon = 0.0;
  AnomalyType type = AnomalyType::Pothole;
  Severity severity = Severity::Mild;
};

struct ParseError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<RawReport> reports;
  std::vector<ParseError> errors;
  std::size_t line_count = 0;  // non-empty lines seen
};

struct IngestStats {
  std::size_t accepted = 0;
  std::size_t rejected_invalid = 0;
  std::size_t rejected_unmatched = 0;
  std::size_t deduplicated = 0;
};

// Line-delimited JSON records; malformed lines become positioned errors and
// never abort the batch. Blank lines are skipped.
ParseResult parse_reports(std::istream& in);

// Drops records sharing device id, anomaly type, position within 5 m and
// timestamp within 10 s of an earlier kept record; keeps the earliest.
// Returns kept records (timestamp order) and the number removed.
std::pair<std::vector<RawReport>, std::size_t> dedup_reports(std::vector<RawReport> reports);

// Content-derived report id; re-ingesting the same record is a no-op.
std::string report_id(const RawReport& r);

// Seconds since the Unix epoch for an ISO-8601 UTC timestamp, or nullopt.
std::optional<std::int64_t> parse_timestamp_utc(std::string_view iso);

// ------------------------------------------------------------------- config

fuzzy::FisDefinition load_fis_config(const nlohmann::json& doc);
fuzzy::FisDefinition load_fis_config_file(const std::filesystem::path& path);

// Optional "label_scores" block of a suggestion config; defaults otherwise.
LabelScores load_label_scores_file(const std::filesystem::path& path);

// ------------------------------------------------------------------ network

RoadNetwork load_network(const nlohmann::json& doc);
RoadNetwork load_network_file(const std::filesystem::path& path);

std::vector<RouteCandidate> load_candidates(const nlohmann::json& doc,
                                            const RoadNetwork& network);
std::vector<RouteCandidate> load_candidates_file(const std::filesystem::path& path,
                                                 const RoadNetwork& network);

// -------------------------------------------------------------------- store

nlohmann::json store_to_json(const StoreSnapshot& snapshot);
// Replays a store document onto the network (records keep their segment ids).
std::size_t load_store_into(const nlohmann::json& doc, RoadNetwork& network);
std::size_t load_store_file_into(const std::filesystem::path& path, RoadNetwork& network);

// ------------------------------------------------------------------ geojson

// FeatureCollection with one LineString per segment; properties carry
// segment_id, quality_score, quality_label and a stroke color
// (green / orange / red). Optional ranked route features follow.
nlohmann::json export_geojson(
    const RoadNetwork& network,
    const std::map<SegmentId, SegmentAssessment>& assessments,
    const std::vector<RouteRecommendation>* recommendations = nullptr,
    const std::map<int, std::vector<SegmentId>>* route_segments = nullptr);

}  // namespace roadq::io
