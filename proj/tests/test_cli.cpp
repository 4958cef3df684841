#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBin = ROADQ_BIN;
const std::string kData = ROADQ_DATA_DIR;
const std::string kTestData = ROADQ_TEST_DATA_DIR;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "roadq_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = kBin + " " + args + " > " + out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string demo_args() {
  return "demo --data " + kData + " --no-header";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("ingest accounts for every input line") {
  const fs::path store = scratch_dir() / "store_mixed.json";
  const RunResult r = run("ingest --network " + kData + "/demo/network.json --reports " +
                          kTestData + "/reports_mixed.jsonl --store " + store.string() +
                          " --no-header");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "accepted 9"));
  CHECK(contains(r.out, "rejected_invalid 1"));
  CHECK(contains(r.out, "rejected_unmatched 0"));
  CHECK(contains(r.out, "deduplicated 1"));
  CHECK(contains(r.err, "latitude out of range"));
  CHECK(fs::exists(store));
}

TEST_CASE("ingest of an empty reports file gives all-zero stats") {
  const fs::path empty = scratch_dir() / "empty.jsonl";
  std::ofstream(empty).close();
  const RunResult r = run("ingest --network " + kData + "/demo/network.json --reports " +
                          empty.string() + " --no-header");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "accepted 0"));
  CHECK(contains(r.out, "rejected_invalid 0"));
  CHECK(contains(r.out, "deduplicated 0"));
}

TEST_CASE("missing input files exit with the configuration code") {
  const RunResult r = run("ingest --network /definitely/not/here.json --reports " +
                          kTestData + "/reports_mixed.jsonl --no-header");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.err, "/definitely/not/here.json"));
}

TEST_CASE("assess prints one deterministic row per segment") {
  const fs::path store = scratch_dir() / "store_demo.json";
  const RunResult ingest = run("ingest --network " + kData +
                               "/demo/network.json --reports " + kData +
                               "/demo/reports.jsonl --store " + store.string() +
                               " --no-header");
  REQUIRE(ingest.exit_code == 0);
  CHECK(contains(ingest.out, "accepted 64"));

  const std::string assess_args = "assess --network " + kData +
                                  "/demo/network.json --store " + store.string() +
                                  " --assess-fis " + kData +
                                  "/fis_assessment.json --no-header";
  const RunResult a = run(assess_args);
  const RunResult b = run(assess_args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);  // byte-identical across runs

  std::istringstream lines(a.out);
  std::string line;
  int rows = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line == "segment ra severity lanes score label") {
      header_seen = true;
      continue;
    }
    if (!line.empty()) ++rows;
  }
  CHECK(header_seen);
  CHECK(rows == 19);
}

TEST_CASE("assess without a store treats the network as anomaly-free") {
  const RunResult r = run("assess --network " + kData + "/demo/network.json --assess-fis " +
                          kData + "/fis_assessment.json --no-header");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int good = 0;
  while (std::getline(lines, line)) {
    if (contains(line, " Good")) ++good;
  }
  CHECK(good == 19);
}

TEST_CASE("assess warns on stderr when inputs leave their universe") {
  nlohmann::json doc;
  {
    std::ifstream in(kData + "/demo/network.json");
    in >> doc;
  }
  doc["segments"][0]["lanes"] = 6;  // lanes universe tops out at 4
  const fs::path wide = scratch_dir() / "wide_network.json";
  std::ofstream(wide) << doc.dump();
  const RunResult r = run("assess --network " + wide.string() + " --assess-fis " + kData +
                          "/fis_assessment.json --no-header");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.err, "clamped"));
  CHECK(contains(r.err, "lanes"));
}

TEST_CASE("assess writes valid GeoJSON when asked") {
  const fs::path geo = scratch_dir() / "segments.geojson";
  const RunResult r = run("assess --network " + kData + "/demo/network.json --assess-fis " +
                          kData + "/fis_assessment.json --geojson " + geo.string() +
                          " --no-header");
  CHECK(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(slurp(geo));
  CHECK(doc["type"] == "FeatureCollection");
  CHECK(doc["features"].size() == 19);
}

TEST_CASE("plan with imported candidates puts the better-quality route first") {
  const fs::path store = scratch_dir() / "store_plan.json";
  REQUIRE(run("ingest --network " + kData + "/demo/network.json --reports " + kData +
              "/demo/reports.jsonl --store " + store.string() + " --no-header")
              .exit_code == 0);
  const RunResult r = run("plan --network " + kData + "/demo/network.json --store " +
                          store.string() + " --assess-fis " + kData +
                          "/fis_assessment.json --suggest-fis " + kData +
                          "/fis_suggestion.json --candidates " + kData +
                          "/demo/candidates.json --no-header");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == "rank route level score time_min length_km avg_quality");
  CHECK(first.rfind("1 2 ", 0) == 0);  // rank 1 is route 2
  CHECK(second.rfind("2 1 NotSuggested", 0) == 0);
}

TEST_CASE("plan finds internal candidates between demo endpoints") {
  const RunResult r = run("plan 1 10 --network " + kData + "/demo/network.json --assess-fis " +
                          kData + "/fis_assessment.json --suggest-fis " + kData +
                          "/fis_suggestion.json --k 3 --weight time --no-header");
  CHECK(r.exit_code == 0);
  // demo graph carries exactly two distinct simple routes between the endpoints
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] >= '1' && line[0] <= '9') ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("degenerate plan requests are refused with the no-route code") {
  const std::string common = " --network " + kData + "/demo/network.json --assess-fis " +
                             kData + "/fis_assessment.json --suggest-fis " + kData +
                             "/fis_suggestion.json --no-header";
  CHECK(run("plan 1 1" + common).exit_code == 3);
  // all demo edges point away from node 10; the reverse trip is unreachable
  CHECK(run("plan 10 1" + common).exit_code == 3);
}

TEST_CASE("single imported candidate gets unit ratios and rank 1") {
  const fs::path file = scratch_dir() / "one_candidate.json";
  std::ofstream(file) << R"({"schema_version":1,"routes":[{"id":5,"segments":[1,2,3]}]})";
  const RunResult r = run("plan --network " + kData + "/demo/network.json --assess-fis " +
                          kData + "/fis_assessment.json --suggest-fis " + kData +
                          "/fis_suggestion.json --candidates " + file.string() +
                          " --no-header");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "1 5 "));
}

TEST_CASE("demo reproduces the bundled case study and is deterministic") {
  const RunResult a = run(demo_args());
  CHECK(a.exit_code == 0);
  CHECK(contains(a.out, "route 2 ranked first: yes"));
  CHECK(contains(a.out, "route 1 not suggested: yes"));
  CHECK(contains(a.out, "segment labels as expected: yes"));

  const RunResult b = run(demo_args());
  CHECK(a.out == b.out);
}

TEST_CASE("demo fails loudly when the suggestion rules are sabotaged") {
  nlohmann::json doc;
  {
    std::ifstream in(kData + "/fis_suggestion.json");
    in >> doc;
  }
  for (auto& rule : doc["rules"]) {
    if (rule["when"].contains("avg_quality") && rule["when"]["avg_quality"] == "Poor") {
      rule["then"]["recommendation"] = "Suggested";
    }
  }
  const fs::path bad = scratch_dir() / "sabotaged_suggestion.json";
  std::ofstream(bad) << doc.dump(2);

  const RunResult r = run(demo_args() + " --suggest-fis " + bad.string());
  CHECK(r.exit_code == 1);
  CHECK(contains(r.out, "== diff =="));
}
