#include "roadq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "roadq/errors.hpp"

namespace roadq::io {

using nlohmann::json;

// ----------------------------------------------------------------- timestamp

std::optional<std::int64_t> parse_timestamp_utc(std::string_view iso) {
  // strict YYYY-MM-DDTHH:MM:SSZ
  if (iso.size() != 20 || iso[4] != '-' || iso[7] != '-' || iso[10] != 'T' ||
      iso[13] != ':' || iso[16] != ':' || iso[19] != 'Z') {
    return std::nullopt;
  }
  auto num = [&](int pos, int len) -> int {
    int v = 0;
    for (int i = pos; i < pos + len; ++i) {
      if (iso[i] < '0' || iso[i] > '9') return -1;
      v = v * 10 + (iso[i] - '0');
    }
    return v;
  };
  const int y = num(0, 4), mo = num(5, 2), d = num(8, 2);
  const int h = num(11, 2), mi = num(14, 2), s = num(17, 2);
  if (y < 1970 || mo < 1 || mo > 12 || d < 1 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
      s < 0 || s > 60) {
    return std::nullopt;
  }
  static const int days_in[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const int dim = (mo == 2 && leap) ? 29 : days_in[mo - 1];
  if (d > dim) return std::nullopt;

  // days since epoch, civil-from-days inverse (Hinnant)
  const int yy = y - (mo <= 2 ? 1 : 0);
  const int era = yy / 400;
  const int yoe = yy - era * 400;
  const int doy = (153 * (mo + (mo > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const std::int64_t days = static_cast<std::int64_t>(era) * 146097 + doe - 719468;
  return days * 86400 + h * 3600 + mi * 60 + s;
}

// ------------------------------------------------------------------- reports

ParseResult parse_reports(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.line_count;

    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      result.errors.push_back({line_no, "malformed record"});
      continue;
    }
    auto str_field = [&](const char* key) -> std::optional<std::string> {
      auto it = doc.find(key);
      if (it == doc.end() || !it->is_string()) return std::nullopt;
      return it->get<std::string>();
    };
    auto num_field = [&](const char* key) -> std::optional<double> {
      auto it = doc.find(key);
      if (it == doc.end() || !it->is_number()) return std::nullopt;
      return it->get<double>();
    };

    RawReport r;
    std::string problem;
    if (auto v = str_field("device_id"); v && !v->empty()) {
      r.device_id = *v;
    } else {
      problem = "missing device_id";
    }
    if (problem.empty()) {
      if (auto v = str_field("timestamp")) {
        if (auto ts = parse_timestamp_utc(*v)) {
          r.timestamp = *v;
          r.timestamp_s = *ts;
        } else {
          problem = "unparseable timestamp";
        }
      } else {
        problem = "missing timestamp";
      }
    }
    if (problem.empty()) {
      auto lat = num_field("lat");
      auto lon = num_field("lon");
      if (!lat || !lon) {
        problem = "missing coordinates";
      } else if (*lat < -90.0 || *lat > 90.0 || !std::isfinite(*lat)) {
        problem = "latitude out of range";
      } else if (*lon < -180.0 || *lon > 180.0 || !std::isfinite(*lon)) {
        problem = "longitude out of range";
      } else {
        r.lat = *lat;
        r.lon = *lon;
      }
    }
    if (problem.empty()) {
      if (auto v = str_field("anomaly_type")) {
        if (auto t = anomaly_type_from_string(*v)) {
          r.type = *t;
        } else {
          problem = "unknown anomaly_type '" + *v + "'";
        }
      } else {
        problem = "missing anomaly_type";
      }
    }
    if (problem.empty()) {
      if (auto v = str_field("severity")) {
        if (auto s = severity_from_string(*v)) {
          r.severity = *s;
        } else {
          problem = "unknown severity '" + *v + "'";
        }
      } else {
        problem = "missing severity";
      }
    }

    if (problem.empty()) {
      result.reports.push_back(std::move(r));
    } else {
      result.errors.push_back({line_no, problem});
    }
  }
  return result;
}

std::pair<std::vector<RawReport>, std::size_t> dedup_reports(std::vector<RawReport> reports) {
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return reports[a].timestamp_s < reports[b].timestamp_s;
  });

  std::vector<RawReport> kept;
  std::size_t dropped = 0;
  for (std::size_t idx : order) {
    const RawReport& r = reports[idx];
    bool duplicate = false;
    for (const RawReport& k : kept) {
      if (k.device_id != r.device_id || k.type != r.type) continue;
      if (std::llabs(r.timestamp_s - k.timestamp_s) > 10) continue;
      if (geo::haversine_m({k.lat, k.lon}, {r.lat, r.lon}) <= 5.0) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      ++dropped;
    } else {
      kept.push_back(r);
    }
  }
  return {std::move(kept), dropped};
}

std::string report_id(const RawReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f,%.7f", r.lat, r.lon);
  return r.device_id + "|" + r.timestamp + "|" + std::string(to_string(r.type)) + "|" +
         std::string(to_string(r.severity)) + "|" + buf;
}

// -------------------------------------------------------------------- config

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

void check_schema_version(const json& doc, const char* what) {
  auto it = doc.find("schema_version");
  if (it == doc.end()) {
    config_fail(std::string(what) + ": missing schema_version");
  }
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
    config_fail(std::string(what) + ": unsupported schema_version");
  }
}

fuzzy::MembershipFunction parse_mf(const json& term, const std::string& where) {
  const std::string kind = term.value("kind", "");
  const json params = term.value("params", json::object());
  auto need = [&](const char* key) -> double {
    auto it = params.find(key);
    if (it == params.end() || !it->is_number()) {
      config_fail(where + ": membership function missing parameter '" + key + "'");
    }
    return it->get<double>();
  };
  if (kind == "sig") {
    return fuzzy::MembershipFunction::sig(need("m"), need("n"));
  }
  if (kind == "psig") {
    const double m1 = need("m1"), n1 = need("n1"), m2 = need("m2"), n2 = need("n2");
    if ((m1 >= 0.0) == (m2 >= 0.0)) {
      config_fail(where + ": psig slopes must have opposite signs");
    }
    return fuzzy::MembershipFunction::psig(m1, n1, m2, n2);
  }
  config_fail(where + ": unknown membership kind '" + kind + "'");
}

fuzzy::LinguisticVariable parse_variable(const json& var, const std::string& what) {
  fuzzy::LinguisticVariable v;
  if (!var.contains("name") || !var["name"].is_string()) {
    config_fail(what + ": variable missing name");
  }
  v.name = var["name"].get<std::string>();
  const std::string where = what + " variable '" + v.name + "'";
  if (!var.contains("universe") || !var["universe"].is_array() ||
      var["universe"].size() != 2) {
    config_fail(where + ": universe must be [lo, hi]");
  }
  v.lo = var["universe"][0].get<double>();
  v.hi = var["universe"][1].get<double>();
  if (!(v.lo < v.hi)) {
    config_fail(where + ": universe lo must be < hi");
  }
  if (!var.contains("terms") || !var["terms"].is_array() || var["terms"].size() < 2) {
    config_fail(where + ": needs at least 2 terms");
  }
  for (const json& t : var["terms"]) {
    if (!t.contains("name") || !t["name"].is_string()) {
      config_fail(where + ": term missing name");
    }
    const std::string tname = t["name"].get<std::string>();
    v.terms.push_back({tname, parse_mf(t, where + " term '" + tname + "'")});
  }
  return v;
}

fuzzy::Conjunction parse_conjunction(const json& obj, const std::string& where) {
  if (!obj.is_object() || obj.empty()) {
    config_fail(where + ": antecedent clause must be a non-empty object");
  }
  fuzzy::Conjunction conj;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it.value().is_string()) {
      config_fail(where + ": term reference must be a string");
    }
    conj.atoms.emplace_back(it.key(), it.value().get<std::string>());
  }
  return conj;
}

}  // namespace

fuzzy::FisDefinition load_fis_config(const json& doc) {
  check_schema_version(doc, "fis config");
  const std::string name = doc.value("name", "fis");

  if (!doc.contains("inputs") || !doc["inputs"].is_array() || doc["inputs"].empty()) {
    config_fail("fis config '" + name + "': missing inputs");
  }
  std::vector<fuzzy::LinguisticVariable> inputs;
  for (const json& v : doc["inputs"]) {
    inputs.push_back(parse_variable(v, "fis config '" + name + "'"));
  }
  if (!doc.contains("output")) {
    config_fail("fis config '" + name + "': missing output");
  }
  fuzzy::LinguisticVariable output =
      parse_variable(doc["output"], "fis config '" + name + "'");

  if (!doc.contains("rules") || !doc["rules"].is_array() || doc["rules"].empty()) {
    config_fail("fis config '" + name + "': empty rules");
  }
  std::vector<fuzzy::Rule> rules;
  int rule_no = 0;
  for (const json& r : doc["rules"]) {
    ++rule_no;
    const std::string where = "fis config '" + name + "' rule " + std::to_string(rule_no);
    fuzzy::Rule rule;
    if (!r.contains("when")) config_fail(where + ": missing 'when'");
    const json& when = r["when"];
    if (when.is_array()) {
      for (const json& branch : when) {
        rule.branches.push_back(parse_conjunction(branch, where));
      }
      if (rule.branches.empty()) config_fail(where + ": empty 'when'");
    } else {
      rule.branches.push_back(parse_conjunction(when, where));
    }
    if (!r.contains("then") || !r["then"].is_object() || r["then"].size() != 1) {
      config_fail(where + ": 'then' must map the output variable to a term");
    }
    const auto then_it = r["then"].begin();
    rule.output_variable = then_it.key();
    if (!then_it.value().is_string()) config_fail(where + ": consequent term must be a string");
    rule.output_term = then_it.value().get<std::string>();
    rules.push_back(std::move(rule));
  }

  const int grid = doc.value("defuzz_grid_points", 1001);
  if (grid < 2) config_fail("fis config '" + name + "': defuzz_grid_points must be >= 2");

  fuzzy::FisDefinition fis(name, std::move(inputs), std::move(output), std::move(rules), grid);
  const fuzzy::ValidationReport report = fuzzy::validate_fis(fis);
  if (!report.passed) {
    std::ostringstream msg;
    msg << "fis config '" << name << "' failed validation:";
    for (const std::string& issue : report.issues) msg << "\n  - " << issue;
    config_fail(msg.str());
  }
  return fis;
}

namespace {

json load_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    config_fail(std::string(what) + ": cannot open " + path.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    config_fail(std::string(what) + ": invalid JSON in " + path.string());
  }
  return doc;
}

}  // namespace

fuzzy::FisDefinition load_fis_config_file(const std::filesystem::path& path) {
  return load_fis_config(load_json_file(path, "fis config"));
}

LabelScores load_label_scores_file(const std::filesystem::path& path) {
  const json doc = load_json_file(path, "fis config");
  LabelScores scores;
  if (doc.contains("label_scores")) {
    const json& ls = doc["label_scores"];
    scores.good = ls.value("Good", scores.good);
    scores.moderate = ls.value("Moderate", scores.moderate);
    scores.poor = ls.value("Poor", scores.poor);
  }
  return scores;
}

// ------------------------------------------------------------------ network

RoadNetwork load_network(const json& doc) {
  check_schema_version(doc, "network file");
  RoadNetwork net;
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    config_fail("network file: missing nodes");
  }
  for (const json& n : doc["nodes"]) {
    RoadNode node;
    node.id = n.at("id").get<NodeId>();
    node.pos.lat = n.at("lat").get<double>();
    node.pos.lon = n.at("lon").get<double>();
    try {
      net.add_node(node);
    } catch (const std::invalid_argument& e) {
      config_fail(std::string("network file: ") + e.what());
    }
  }
  if (!doc.contains("segments") || !doc["segments"].is_array()) {
    config_fail("network file: missing segments");
  }
  for (const json& s : doc["segments"]) {
    RoadSegment seg;
    seg.id = s.at("id").get<SegmentId>();
    seg.from = s.at("from").get<NodeId>();
    seg.to = s.at("to").get<NodeId>();
    for (const json& pt : s.at("polyline")) {
      if (!pt.is_array() || pt.size() != 2) {
        config_fail("network file: polyline points must be [lat, lon] pairs");
      }
      seg.polyline.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    seg.lanes = s.at("lanes").get<int>();
    seg.speed_kmh = s.at("speed_kmh").get<double>();
    std::optional<double> declared;
    if (s.contains("length_m")) declared = s["length_m"].get<double>();
    try {
      net.add_segment(std::move(seg), declared);
    } catch (const std::invalid_argument& e) {
      config_fail(std::string("network file: ") + e.what());
    }
  }
  return net;
}

RoadNetwork load_network_file(const std::filesystem::path& path) {
  return load_network(load_json_file(path, "network file"));
}

std::vector<RouteCandidate> load_candidates(const json& doc, const RoadNetwork& network) {
  check_schema_version(doc, "candidates file");
  if (!doc.contains("routes") || !doc["routes"].is_array() || doc["routes"].empty()) {
    config_fail("candidates file: missing routes");
  }
  std::vector<RouteCandidate> out;
  for (const json& r : doc["routes"]) {
    RouteCandidate c;
    c.id = r.at("id").get<int>();
    c.source = RouteCandidate::Source::Imported;
    const std::string where = "candidates file route " + std::to_string(c.id);
    if (!r.contains("segments") || !r["segments"].is_array() || r["segments"].empty()) {
      config_fail(where + ": missing segments");
    }
    std::set<NodeId> visited;
    const RoadSegment* prev = nullptr;
    for (const json& sid_json : r["segments"]) {
      const SegmentId sid = sid_json.get<SegmentId>();
      const RoadSegment* seg = network.find_segment(sid);
      if (seg == nullptr) {
        config_fail(where + ": unknown segment " + std::to_string(sid));
      }
      if (prev == nullptr) {
        visited.insert(seg->from);
      } else if (prev->to != seg->from) {
        config_fail(where + ": segments " + std::to_string(prev->id) + " and " +
                    std::to_string(sid) + " are not connected");
      }
      if (!visited.insert(seg->to).second) {
        config_fail(where + ": repeated node " + std::to_string(seg->to));
      }
      c.segments.push_back(sid);
      c.time_min += segment_travel_min(*seg);
      c.length_km += seg->length_m / 1000.0;
      prev = seg;
    }
    if (r.contains("time_min")) c.time_min = r["time_min"].get<double>();
    if (r.contains("length_km")) c.length_km = r["length_km"].get<double>();
    if (!(c.time_min > 0.0) || !(c.length_km > 0.0)) {
      config_fail(where + ": non-positive time or length");
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RouteCandidate> load_candidates_file(const std::filesystem::path& path,
                                                 const RoadNetwork& network) {
  return load_candidates(load_json_file(path, "candidates file"), network);
}

// -------------------------------------------------------------------- store

json store_to_json(const StoreSnapshot& snapshot) {
  json records = json::array();
  if (snapshot.records) {
    for (const auto& [sid, recs] : *snapshot.records) {
      for (const AnomalyRecord& r : recs) {
        records.push_back({
            {"report_id", r.report_id},
            {"segment_id", r.segment_id},
            {"anomaly_type", std::string(to_string(r.type))},
            {"severity", std::string(to_string(r.severity))},
            {"timestamp", r.timestamp},
            {"lat", r.pos.lat},
            {"lon", r.pos.lon},
            {"distance_to_segment_m", r.distance_to_segment_m},
        });
      }
    }
  }
  return json{{"schema_version", kSchemaVersion},
              {"version", snapshot.version},
              {"records", std::move(records)}};
}

std::size_t load_store_into(const json& doc, RoadNetwork& network) {
  check_schema_version(doc, "store file");
  if (!doc.contains("records") || !doc["records"].is_array()) {
    config_fail("store file: missing records");
  }
  std::size_t stored = 0;
  for (const json& r : doc["records"]) {
    AnomalyObservation obs;
    obs.report_id = r.at("report_id").get<std::string>();
    obs.pos.lat = r.at("lat").get<double>();
    obs.pos.lon = r.at("lon").get<double>();
    const auto type = anomaly_type_from_string(r.at("anomaly_type").get<std::string>());
    const auto sev = severity_from_string(r.at("severity").get<std::string>());
    if (!type || !sev) {
      config_fail("store file: unknown anomaly_type or severity");
    }
    obs.type = *type;
    obs.severity = *sev;
    obs.timestamp = r.at("timestamp").get<std::string>();
    const auto ts = parse_timestamp_utc(obs.timestamp);
    if (!ts) config_fail("store file: unparseable timestamp");
    obs.timestamp_s = *ts;
    // the stored record re-matches its own segment; widen slightly for safety
    const double threshold = r.value("distance_to_segment_m", 0.0) + 1.0;
    const AttachResult res =
        network.attach_anomaly(obs, std::max(threshold, kDefaultMatchThresholdM));
    if (res.outcome == AttachOutcome::Stored) ++stored;
  }
  return stored;
}

std::size_t load_store_file_into(const std::filesystem::path& path, RoadNetwork& network) {
  return load_store_into(load_json_file(path, "store file"), network);
}

// ------------------------------------------------------------------ geojson

namespace {

const char* stroke_for(const std::string& label) {
  if (label == "Good") return "green";
  if (label == "Moderate") return "orange";
  return "red";
}

json polyline_coords(const std::vector<geo::LatLon>& polyline) {
  json coords = json::array();
  for (const geo::LatLon& p : polyline) {
    coords.push_back({p.lon, p.lat});  // GeoJSON order is [lon, lat]
  }
  return coords;
}

}  // namespace

json export_geojson(const RoadNetwork& network,
                    const std::map<SegmentId, SegmentAssessment>& assessments,
                    const std::vector<RouteRecommendation>* recommendations,
                    const std::map<int, std::vector<SegmentId>>* route_segments) {
  json features = json::array();
  for (const auto& [sid, seg] : network.segments()) {
    auto it = assessments.find(sid);
    if (it == assessments.end()) {
      throw std::invalid_argument("export_geojson: segment " + std::to_string(sid) +
                                  " has no assessment");
    }
    const SegmentAssessment& a = it->second;
    features.push_back({
        {"type", "Feature"},
        {"geometry", {{"type", "LineString"}, {"coordinates", polyline_coords(seg.polyline)}}},
        {"properties",
         {{"segment_id", sid},
          {"quality_score", a.quality_score},
          {"quality_label", a.label},
          {"stroke", stroke_for(a.label)}}},
    });
  }
  if (recommendations != nullptr && route_segments != nullptr) {
    for (const RouteRecommendation& rec : *recommendations) {
      auto rit = route_segments->find(rec.route_id);
      if (rit == route_segments->end()) continue;
      std::vector<geo::LatLon> path;
      for (SegmentId sid : rit->second) {
        const RoadSegment* seg = network.find_segment(sid);
        if (seg == nullptr) continue;
        for (std::size_t i = path.empty() ? 0 : 1; i < seg->polyline.size(); ++i) {
          path.push_back(seg->polyline[i]);
        }
      }
      features.push_back({
          {"type", "Feature"},
          {"geometry", {{"type", "LineString"}, {"coordinates", polyline_coords(path)}}},
          {"properties",
           {{"route_id", rec.route_id},
            {"rank", rec.rank},
            {"level", rec.level},
            {"score", rec.score}}},
      });
    }
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace roadq::io
