#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "cloudq/cli.hpp"
#include "cloudq/error.hpp"
#include "test_support.hpp"

using namespace cloudq;
namespace fs = std::filesystem;
using cloudq::testing::lines;
using cloudq::testing::read_file;
using cloudq::testing::split;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cloudq");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<int> percents(const fs::path& csv) {
  std::vector<int> out;
  const auto rows = lines(read_file(csv));
  for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(std::stoi(split(rows[i], ',')[2]));
  return out;
}

}  // namespace

TEST_CASE("run the worked example writes the report set") {
  const fs::path dir = cloudq::testing::temp_dir("cli-run");
  const Result r = invoke({"run", "scenarios/table6_demo.scn", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  for (const char* f : {"summary.csv", "rejections.csv", "jobs.csv", "starvation.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto rows = lines(read_file(dir / "jobs.csv"));
  REQUIRE(rows.size() == 6);
  std::vector<std::string> waits;
  for (std::size_t i = 1; i < rows.size(); ++i) waits.push_back(split(rows[i], ',')[4]);
  CHECK(waits == std::vector<std::string>{"0", "9", "16", "3", "8"});
  CHECK(read_file(dir / "rejections.csv") == "submitted,rejected,percent\n5,0,0\n");
  fs::remove_all(dir);
}

TEST_CASE("run accepts --scenario and prints JSON") {
  const fs::path dir = cloudq::testing::temp_dir("cli-json");
  const Result r = invoke({"run", "--scenario", "table6_demo.scn", "--out", dir.string(), "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["submitted"] == 5);
  CHECK(j["completed"] == 5);
  CHECK(j["time_unit"] == "hours");
  CHECK(j["summary"]["queue_wait"]["max"] == 16);
  fs::remove_all(dir);
}

TEST_CASE("missing scenario file exits 2 without output") {
  const fs::path dir = cloudq::testing::temp_dir("cli-missing");
  const Result r = invoke({"run", "missing.scn", "--out", (dir / "o").string()});
  CHECK(r.code == cli::kScenarioError);
  CHECK(r.err.find("missing.scn") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o"));
  fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical") {
  for (const char* scenario : {"peak_sweep.scn", "paper_tables.scn"}) {
    CAPTURE(scenario);
    const fs::path a = cloudq::testing::temp_dir("cli-a");
    const fs::path b = cloudq::testing::temp_dir("cli-b");
    REQUIRE(invoke({"run", scenario, "--seed", "42", "--out", a.string()}).code == 0);
    REQUIRE(invoke({"run", scenario, "--seed", "42", "--out", b.string()}).code == 0);
    for (const char* f : {"summary.csv", "rejections.csv", "jobs.csv"}) {
      CAPTURE(f);
      CHECK(read_file(a / f) == read_file(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("sweep writes one row per level") {
  const fs::path dir = cloudq::testing::temp_dir("cli-sweep");
  const Result r = invoke({"sweep", "peak_sweep.scn", "--sweep", "5,10,15,20,25,30", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(read_file(dir / "rejections.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(split(rows[1], ',')[0] == "5");
  CHECK(split(rows[6], ',')[0] == "30");
  const auto bars = lines(read_file(dir / "rejections_bar.csv"));
  CHECK(bars.size() == 7);
  CHECK(bars[0] == "submitted,rejected");
  fs::remove_all(dir);
}

TEST_CASE("sweep with a single level") {
  const fs::path dir = cloudq::testing::temp_dir("cli-one");
  REQUIRE(invoke({"sweep", "peak_sweep.scn", "--sweep", "10", "--out", dir.string()}).code == 0);
  CHECK(lines(read_file(dir / "rejections.csv")).size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("bad sweep lists exit 2") {
  for (const char* bad : {"5,x", "", "5,,10", "10,5", "0", "5,"}) {
    CAPTURE(bad);
    CHECK(invoke({"sweep", "peak_sweep.scn", "--sweep", bad, "--out", "/tmp/cloudq-unused"}).code ==
          cli::kScenarioError);
  }
  CHECK(invoke({"sweep", "table6_demo.scn", "--sweep", "5", "--out", "/tmp/cloudq-unused"}).code ==
        cli::kScenarioError);
}

TEST_CASE("parse_levels") {
  CHECK(cli::parse_levels("5,10,15") == std::vector<std::uint64_t>{5, 10, 15});
  CHECK_THROWS_AS(cli::parse_levels("a"), ValidationError);
}

TEST_CASE("shortest-job-first sweep never rejects more as load falls") {
  const fs::path dir = cloudq::testing::temp_dir("cli-sjf");
  REQUIRE(invoke({"sweep", "peak_sweep.scn", "--scheduler", "sjf", "--sweep", "5,10,15,20,25,30",
                  "--out", dir.string()})
              .code == 0);
  const auto p = percents(dir / "rejections.csv");
  REQUIRE(p.size() == 6);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= p[i - 1]);
  fs::remove_all(dir);
}

TEST_CASE("demo prints the worked schedule") {
  const Result r = invoke({"demo"});
  CHECK(r.code == 0);
  CHECK(r.out.find("order: 1 4 2 5 3") != std::string::npos);
  CHECK(r.out.find("job 3 wait 16 hours") != std::string::npos);
}

TEST_CASE("demo as JSON") {
  const Result r = invoke({"demo", "--json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["order"] == std::vector<int>{1, 4, 2, 5, 3});
  CHECK(j["waits"]["3"] == 16);
  CHECK(j["match"] == true);
}

TEST_CASE("demo against a tampered expectation exits 4") {
  cli::DemoExpectation e = cli::worked_example_expectation();
  e.waits[3] = 15;
  std::ostringstream out, err;
  CHECK(cli::cmd_demo(e, false, out, err) == cli::kDemoMismatch);
  CHECK(out.str().find("MISMATCH") != std::string::npos);
}

TEST_CASE("validate prints the normalized scenario") {
  const Result r = invoke({"validate", "scenarios/table6_demo.scn"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("time_unit = ms") != std::string::npos);
  CHECK(r.out.find("horizon = 86400000") != std::string::npos);
  CHECK(r.out.find("3 10800000 21600000") != std::string::npos);
  const ScenarioConfig back = load_scenario(r.out);
  CHECK(back == normalized(load_scenario(*embedded_scenario("table6_demo.scn"))));
}

TEST_CASE("validate rejects a duplicate datacenter") {
  const fs::path dir = cloudq::testing::temp_dir("cli-dup");
  std::string text(*embedded_scenario("paper_tables.scn"));
  text += "\n[datacenter.DC1]\nvms = 1\nmemory = 1\nbandwidth = 1\nbandwidth_unit = per_ms\n";
  std::ofstream(dir / "dup.scn") << text;
  const Result r = invoke({"validate", (dir / "dup.scn").string()});
  CHECK(r.code == cli::kScenarioError);
  CHECK(r.err.find("duplicate datacenter id DC1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("overrides are validated") {
  CHECK(invoke({"run", "migration_imbalance.scn", "--scheduler", "sjf", "--out", "/tmp/cloudq-unused"})
            .code == cli::kScenarioError);
  CHECK(invoke({"run", "table6_demo.scn", "--scheduler", "fifo"}).code == cli::kScenarioError);
  CHECK(invoke({"run", "table6_demo.scn", "--deadline", "-1"}).code == cli::kScenarioError);
  CHECK(invoke({"frobnicate"}).code == cli::kScenarioError);
  CHECK(invoke({}).code == cli::kScenarioError);
}

TEST_CASE("deadline override switches admission and rejects") {
  const fs::path dir = cloudq::testing::temp_dir("cli-deadline");
  REQUIRE(invoke({"run", "table6_demo.scn", "--deadline", "10", "--out", dir.string()}).code == 0);
  CHECK(read_file(dir / "rejections.csv") == "submitted,rejected,percent\n5,1,20\n");
  fs::remove_all(dir);
}
