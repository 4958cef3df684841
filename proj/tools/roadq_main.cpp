#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadq/assessment.hpp"
#include "roadq/errors.hpp"
#include "roadq/io.hpp"
#include "roadq/network.hpp"
#include "roadq/routing.hpp"
#include "roadq/suggestion.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoRoute = 3;

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void print_header(const std::string& command, bool no_header) {
  if (no_header) return;
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::cout << "# roadq " << command << " " << buf << "\n";
}

struct CommonOptions {
  std::string network_path;
  std::string reports_path;
  std::string assess_fis_path;
  std::string suggest_fis_path;
  std::string store_path;
  std::string candidates_path;
  std::string geojson_path;
  double threshold_m = roadq::kDefaultMatchThresholdM;
  double dmax = roadq::kDefaultDensityCapPerKm;
  int k = 3;
  std::string weight = "time";
  bool no_header = false;
};

roadq::Weight parse_weight(const std::string& w) {
  return w == "distance" ? roadq::Weight::Distance : roadq::Weight::Time;
}

struct IngestOutcome {
  roadq::io::IngestStats stats;
  std::vector<roadq::io::ParseError> errors;
};

IngestOutcome run_ingest(roadq::RoadNetwork& net, std::istream& reports_in,
                         double threshold_m) {
  IngestOutcome out;
  roadq::io::ParseResult parsed = roadq::io::parse_reports(reports_in);
  out.errors = parsed.errors;
  out.stats.rejected_invalid = parsed.errors.size();

  auto [kept, dropped] = roadq::io::dedup_reports(std::move(parsed.reports));
  out.stats.deduplicated = dropped;

  for (const roadq::io::RawReport& r : kept) {
    roadq::AnomalyObservation obs;
    obs.report_id = roadq::io::report_id(r);
    obs.pos = {r.lat, r.lon};
    obs.type = r.type;
    obs.severity = r.severity;
    obs.timestamp = r.timestamp;
    obs.timestamp_s = r.timestamp_s;
    const roadq::AttachResult res = net.attach_anomaly(obs, threshold_m);
    switch (res.outcome) {
      case roadq::AttachOutcome::Stored:
        ++out.stats.accepted;
        break;
      case roadq::AttachOutcome::Duplicate:
        ++out.stats.deduplicated;
        break;
      case roadq::AttachOutcome::Unmatched:
        ++out.stats.rejected_unmatched;
        break;
    }
  }
  return out;
}

void print_stats(const roadq::io::IngestStats& s) {
  std::cout << "accepted " << s.accepted << "\n"
            << "rejected_invalid " << s.rejected_invalid << "\n"
            << "rejected_unmatched " << s.rejected_unmatched << "\n"
            << "deduplicated " << s.deduplicated << "\n";
}

int cmd_ingest(const CommonOptions& opt) {
  print_header("ingest", opt.no_header);
  roadq::RoadNetwork net = roadq::io::load_network_file(opt.network_path);
  std::ifstream reports(opt.reports_path);
  if (!reports) {
    std::cerr << "error: cannot open reports file " << opt.reports_path << "\n";
    return kExitConfig;
  }
  IngestOutcome out = run_ingest(net, reports, opt.threshold_m);
  for (const roadq::io::ParseError& e : out.errors) {
    std::cerr << opt.reports_path << ":" << e.line << ": " << e.message << "\n";
  }
  if (!opt.store_path.empty()) {
    std::ofstream store_out(opt.store_path);
    if (!store_out) {
      std::cerr << "error: cannot write store file " << opt.store_path << "\n";
      return kExitConfig;
    }
    store_out << roadq::io::store_to_json(net.snapshot()).dump(2) << "\n";
  }
  print_stats(out.stats);
  return kExitOk;
}

std::map<roadq::SegmentId, roadq::SegmentAssessment> assess_with_warnings(
    const roadq::RoadNetwork& net, const roadq::fuzzy::FisDefinition& fis, double dmax) {
  std::vector<roadq::fuzzy::ClampEvent> clamps;
  auto assessments = roadq::assess_network(net, net.snapshot(), fis, dmax, &clamps);
  if (!clamps.empty()) {
    std::cerr << "warning: " << clamps.size()
              << " input value(s) outside their universe were clamped (first: "
              << clamps.front().variable << " " << clamps.front().given << " -> "
              << clamps.front().clamped_to << ")\n";
  }
  return assessments;
}

void print_assessment_rows(const std::map<roadq::SegmentId, roadq::SegmentAssessment>& as) {
  std::cout << "segment ra severity lanes score label\n";
  for (const auto& [sid, a] : as) {
    std::cout << sid << " " << fmt4(a.features.ra) << " " << fmt4(a.features.severity_index)
              << " " << static_cast<int>(a.features.lanes) << " " << fmt4(a.quality_score)
              << " " << a.label << "\n";
  }
}

int cmd_assess(const CommonOptions& opt) {
  print_header("assess", opt.no_header);
  roadq::RoadNetwork net = roadq::io::load_network_file(opt.network_path);
  if (!opt.store_path.empty()) {
    roadq::io::load_store_file_into(opt.store_path, net);
  }
  const roadq::fuzzy::FisDefinition fis =
      roadq::io::load_fis_config_file(opt.assess_fis_path);
  const auto assessments = assess_with_warnings(net, fis, opt.dmax);
  print_assessment_rows(assessments);
  if (!opt.geojson_path.empty()) {
    std::ofstream out(opt.geojson_path);
    if (!out) {
      std::cerr << "error: cannot write geojson file " << opt.geojson_path << "\n";
      return kExitConfig;
    }
    out << roadq::io::export_geojson(net, assessments).dump(2) << "\n";
  }
  return kExitOk;
}

void print_ranking(const std::vector<roadq::RouteRecommendation>& recs) {
  std::cout << "rank route level score time_min length_km avg_quality\n";
  for (const roadq::RouteRecommendation& r : recs) {
    std::cout << r.rank << " " << r.route_id << " " << r.level << " " << fmt4(r.score) << " "
              << fmt4(r.metrics.time_min) << " " << fmt4(r.metrics.length_km) << " "
              << fmt4(r.metrics.avg_quality) << "\n";
  }
}

std::vector<roadq::RouteRecommendation> rank_candidates(
    const std::vector<roadq::RouteCandidate>& candidates, const roadq::RoadNetwork& net,
    const std::map<roadq::SegmentId, roadq::SegmentAssessment>& assessments,
    const roadq::fuzzy::FisDefinition& suggest_fis) {
  std::vector<roadq::TimeDistance> td;
  std::vector<double> quality;
  for (const roadq::RouteCandidate& c : candidates) {
    const roadq::RouteTotals totals = roadq::route_metrics(c, net, assessments);
    td.push_back({c.time_min, c.length_km});
    quality.push_back(totals.avg_quality);
  }
  std::vector<roadq::RouteMetrics> metrics = roadq::normalize_candidates(td);
  std::vector<roadq::RouteInput> inputs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    metrics[i].avg_quality = quality[i];
    inputs.push_back({candidates[i].id, metrics[i]});
  }
  return roadq::suggest_routes(inputs, suggest_fis);
}

int cmd_plan(const CommonOptions& opt, std::optional<roadq::NodeId> src,
             std::optional<roadq::NodeId> dst) {
  print_header("plan", opt.no_header);
  roadq::RoadNetwork net = roadq::io::load_network_file(opt.network_path);
  if (!opt.store_path.empty()) {
    roadq::io::load_store_file_into(opt.store_path, net);
  }
  const roadq::fuzzy::FisDefinition assess_fis =
      roadq::io::load_fis_config_file(opt.assess_fis_path);
  const roadq::fuzzy::FisDefinition suggest_fis =
      roadq::io::load_fis_config_file(opt.suggest_fis_path);
  const auto assessments = assess_with_warnings(net, assess_fis, opt.dmax);

  std::vector<roadq::RouteCandidate> candidates;
  if (!opt.candidates_path.empty()) {
    candidates = roadq::io::load_candidates_file(opt.candidates_path, net);
  } else {
    if (!src || !dst) {
      std::cerr << "error: plan needs either --candidates or src and dst nodes\n";
      return kExitConfig;
    }
    if (*src == *dst) {
      std::cerr << "no route: source equals destination\n";
      return kExitNoRoute;
    }
    candidates = roadq::k_shortest(net, *src, *dst, opt.k, parse_weight(opt.weight));
    if (candidates.empty()) {
      std::cerr << "no route\n";
      return kExitNoRoute;
    }
  }

  const auto recs = rank_candidates(candidates, net, assessments, suggest_fis);
  print_ranking(recs);

  if (!opt.geojson_path.empty()) {
    std::map<int, std::vector<roadq::SegmentId>> route_segments;
    for (const roadq::RouteCandidate& c : candidates) {
      route_segments[c.id] = c.segments;
    }
    std::ofstream out(opt.geojson_path);
    if (!out) {
      std::cerr << "error: cannot write geojson file " << opt.geojson_path << "\n";
      return kExitConfig;
    }
    out << roadq::io::export_geojson(net, assessments, &recs, &route_segments).dump(2)
        << "\n";
  }
  return kExitOk;
}

int cmd_demo(const std::string& data_dir, CommonOptions opt) {
  print_header("demo", opt.no_header);
  if (opt.network_path.empty()) opt.network_path = data_dir + "/demo/network.json";
  if (opt.reports_path.empty()) opt.reports_path = data_dir + "/demo/reports.jsonl";
  if (opt.candidates_path.empty()) opt.candidates_path = data_dir + "/demo/candidates.json";
  if (opt.assess_fis_path.empty()) opt.assess_fis_path = data_dir + "/fis_assessment.json";
  if (opt.suggest_fis_path.empty()) opt.suggest_fis_path = data_dir + "/fis_suggestion.json";

  roadq::RoadNetwork net = roadq::io::load_network_file(opt.network_path);
  std::ifstream reports(opt.reports_path);
  if (!reports) {
    std::cerr << "error: cannot open reports file " << opt.reports_path << "\n";
    return kExitConfig;
  }
  std::cout << "== ingest ==\n";
  const IngestOutcome ingest = run_ingest(net, reports, opt.threshold_m);
  print_stats(ingest.stats);

  const roadq::fuzzy::FisDefinition assess_fis =
      roadq::io::load_fis_config_file(opt.assess_fis_path);
  const roadq::fuzzy::FisDefinition suggest_fis =
      roadq::io::load_fis_config_file(opt.suggest_fis_path);
  const auto assessments = assess_with_warnings(net, assess_fis, opt.dmax);
  const auto candidates = roadq::io::load_candidates_file(opt.candidates_path, net);

  // expected per-segment quality labels of the bundled scenario, by route
  static const std::vector<std::string> kExpectedRoute1 = {
      "Poor", "Poor", "Poor", "Poor", "Poor", "Poor", "Poor", "Moderate", "Poor"};
  static const std::vector<std::string> kExpectedRoute2 = {
      "Moderate", "Moderate", "Good", "Good", "Good",
      "Good",     "Good",     "Moderate", "Moderate", "Poor"};

  std::vector<std::string> diffs;
  for (const roadq::RouteCandidate& c : candidates) {
    const std::vector<std::string>* expected = nullptr;
    if (c.id == 1) expected = &kExpectedRoute1;
    if (c.id == 2) expected = &kExpectedRoute2;
    std::cout << "== route " << c.id << " segment assessment ==\n";
    std::cout << "segment ra severity lanes score label\n";
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
      const roadq::SegmentAssessment& a = assessments.at(c.segments[i]);
      std::cout << a.segment_id << " " << fmt4(a.features.ra) << " "
                << fmt4(a.features.severity_index) << " " << static_cast<int>(a.features.lanes)
                << " " << fmt4(a.quality_score) << " " << a.label << "\n";
      if (expected != nullptr && i < expected->size() && a.label != (*expected)[i]) {
        diffs.push_back("segment " + std::to_string(a.segment_id) + ": expected " +
                        (*expected)[i] + ", got " + a.label);
      }
    }
  }

  const auto recs = rank_candidates(candidates, net, assessments, suggest_fis);
  std::cout << "== ranking ==\n";
  print_ranking(recs);

  bool route2_first = false;
  bool route1_not_suggested = false;
  for (const roadq::RouteRecommendation& r : recs) {
    if (r.route_id == 2 && r.rank == 1) route2_first = true;
    if (r.route_id == 1 && r.level == "NotSuggested") route1_not_suggested = true;
  }
  if (!route2_first) diffs.push_back("expected route 2 at rank 1");
  if (!route1_not_suggested) diffs.push_back("expected route 1 level NotSuggested");

  std::cout << "== verdict ==\n";
  std::cout << "route 2 ranked first: " << (route2_first ? "yes" : "no") << "\n";
  std::cout << "route 1 not suggested: " << (route1_not_suggested ? "yes" : "no") << "\n";
  std::cout << "segment labels as expected: "
            << (diffs.empty() || !route2_first || !route1_not_suggested
                    ? (diffs.empty() ? "yes" : "no")
                    : "no")
            << "\n";
  if (!diffs.empty()) {
    std::cout << "== diff ==\n";
    for (const std::string& d : diffs) std::cout << d << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"road-quality-aware route planning engine"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string data_dir = "data";
  roadq::NodeId src = 0, dst = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--threshold-m", opt.threshold_m, "map-matching threshold, meters");
    cmd->add_option("--dmax", opt.dmax, "anomaly density cap per km");
    cmd->add_flag("--no-header", opt.no_header, "suppress the timestamp header line");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "parse, dedup and map-match reports");
  ingest->add_option("--network", opt.network_path, "network file")->required();
  ingest->add_option("--reports", opt.reports_path, "line-delimited reports file")->required();
  ingest->add_option("--store", opt.store_path, "anomaly store output file");
  add_common(ingest);

  CLI::App* assess = app.add_subcommand("assess", "score every segment");
  assess->add_option("--network", opt.network_path, "network file")->required();
  assess->add_option("--store", opt.store_path, "anomaly store file");
  assess->add_option("--assess-fis", opt.assess_fis_path, "assessment FIS config")->required();
  assess->add_option("--geojson", opt.geojson_path, "write segment GeoJSON here");
  add_common(assess);

  CLI::App* plan = app.add_subcommand("plan", "rank candidate routes");
  plan->add_option("src", src, "source node id");
  plan->add_option("dst", dst, "destination node id");
  plan->add_option("--network", opt.network_path, "network file")->required();
  plan->add_option("--store", opt.store_path, "anomaly store file");
  plan->add_option("--assess-fis", opt.assess_fis_path, "assessment FIS config")->required();
  plan->add_option("--suggest-fis", opt.suggest_fis_path, "suggestion FIS config")->required();
  plan->add_option("--candidates", opt.candidates_path, "imported candidate routes file");
  plan->add_option("--k", opt.k, "number of internal candidates");
  plan->add_option("--weight", opt.weight, "edge weight: time or distance")
      ->check(CLI::IsMember({"time", "distance"}));
  plan->add_option("--geojson", opt.geojson_path, "write route GeoJSON here");
  add_common(plan);

  CLI::App* demo = app.add_subcommand("demo", "reproduce the bundled case study");
  demo->add_option("--data", data_dir, "data directory (default: data)");
  demo->add_option("--network", opt.network_path, "network file override");
  demo->add_option("--reports", opt.reports_path, "reports file override");
  demo->add_option("--candidates", opt.candidates_path, "candidates file override");
  demo->add_option("--assess-fis", opt.assess_fis_path, "assessment FIS override");
  demo->add_option("--suggest-fis", opt.suggest_fis_path, "suggestion FIS override");
  add_common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand(ingest)) return cmd_ingest(opt);
    if (app.got_subcommand(assess)) return cmd_assess(opt);
    if (app.got_subcommand(plan)) {
      std::optional<roadq::NodeId> s, d;
      if (plan->count("src") > 0) s = src;
      if (plan->count("dst") > 0) d = dst;
      return cmd_plan(opt, s, d);
    }
    if (app.got_subcommand(demo)) return cmd_demo(data_dir, opt);
  } catch (const roadq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
