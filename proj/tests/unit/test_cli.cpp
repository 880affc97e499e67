#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support/ws_client.hpp"
#include "webtb/fixture_service.hpp"
#include "webtb/results_io.hpp"

extern char** environ;

using namespace webtb;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns stdout and the exit status.
RunResult run_cli(const std::string& args) {
  const auto cmd = std::string(WEBTB_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string data(const std::string& rel) { return std::string(WEBTB_TEST_DATA) + "/" + rel; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("webtb_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli("--help").exit_code, 0);
  EXPECT_NE(run_cli("").exit_code, 0);
  EXPECT_NE(run_cli("frobnicate").exit_code, 0);
  EXPECT_NE(run_cli("probe --out /tmp/x").exit_code, 0);  // --targets is required
  EXPECT_NE(run_cli("report --in /nonexistent --out /tmp/x").exit_code, 0);
}

TEST(Cli, SimulateWritesBothTables) {
  const auto dir = scratch("simulate");
  const auto r = run_cli("simulate --config " + data("scenario.json") + " --out " + dir.string());
  ASSERT_EQ(r.exit_code, 0);
  const auto revenue = slurp(dir / "revenue.csv");
  EXPECT_NE(revenue.find("ads,ad_slots=3/cpm=1,300\n"), std::string::npos);
  EXPECT_NE(revenue.find("mining,hash_rate=300/tabs=1,54.17\n"), std::string::npos);
  const auto be = lines(slurp(dir / "break_even.csv"));
  ASSERT_EQ(be.size(), 3u);
  EXPECT_TRUE(be[1].starts_with("50,50,1994,33.23,")) << be[1];
  EXPECT_TRUE(be[2].starts_with("300,300,332.3,5.538,5.538,")) << be[2];
  fs::remove_all(dir);
}

TEST(Cli, SimulateRejectsUnknownScenarioKey) {
  const auto dir = scratch("simulate_bad");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"hashrate": 5})";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string()).exit_code, 1);
  fs::remove_all(dir);
}

TEST(Cli, DetectClassifiesSnapshotsAndWritesMarketShare) {
  const auto dir = scratch("detect");
  const auto r = run_cli("detect --miner-lists " + data("lists/miners_hosts.txt") + " " +
                         data("lists/miners_plain.txt") + " --ad-lists " + data("lists/ads_filter.txt") +
                         " --snapshots " + data("snapshots") + " --out " + dir.string());
  ASSERT_EQ(r.exit_code, 0);
  const auto reports = lines(slurp(dir / "detections.jsonl"));
  ASSERT_EQ(reports.size(), 4u);
  std::vector<std::string> classes;
  for (const auto& l : reports) classes.push_back(nlohmann::json::parse(l).at("classification"));
  EXPECT_EQ(classes, (std::vector<std::string>{"miner_supported", "ad_supported", "both", "neither"}));
  const auto share = slurp(dir / "market_share.csv");
  EXPECT_NE(share.find("coinhive"), std::string::npos);
  EXPECT_NE(share.find("cryptoloot,0.5\n"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, ReportAndTrafficOverStoredProbes) {
  const auto dir = scratch("report");
  {
    harness::ResultsSink sink(dir / "probes", nlohmann::json::object());
    for (int i = 0; i < 3; ++i) {
      ProbeResult r;
      r.target_url = "http://site" + std::to_string(i) + "/";
      r.ok = true;
      r.phase1_duration_s = 10;
      SampleSeries s{"cpu", "percent", {"total"}, {}, false, ""};
      s.samples.push_back({1.0, "total", 10.0 * (i + 1)});
      r.phase1["cpu"] = s;
      r.frames.push_back({1.0, WsFrameRecord::Direction::sent, 100 * (i + 1), "ws://h/msp/pow"});
      r.requests.push_back({0.0, "http://h/adsrv/slot1", "", 500, "Image", 200});
      sink.append(r);
    }
    sink.finish("complete");
  }
  ASSERT_EQ(run_cli("report --in " + (dir / "probes").string() + " --out " + (dir / "rep").string()).exit_code, 0);
  EXPECT_EQ(slurp(dir / "rep" / "report_percentiles.csv"), "metric,p10,p25,p50,p75,p90\ncpu.total,12,15,20,25,28\n");

  ASSERT_EQ(run_cli("report --group-a " + (dir / "probes").string() + " --group-b " + (dir / "probes").string() +
                    " --out " + (dir / "cmp").string() + " --format json")
                .exit_code,
            0);
  const auto j = nlohmann::json::parse(slurp(dir / "cmp" / "report.json"));
  EXPECT_FALSE(j.dump().empty());

  ASSERT_EQ(run_cli("traffic --in " + (dir / "probes").string() + " --out " + (dir / "traffic").string()).exit_code, 0);
  const auto rows = lines(slurp(dir / "traffic" / "traffic_summaries.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows[1].starts_with("http://site0/,10,100,500,0,1,")) << rows[1];
  EXPECT_EQ(lines(slurp(dir / "traffic" / "bitrate_distribution.csv"))[1], "miner_bitrate_bps,96,120,160,200,224");
  fs::remove_all(dir);
}

TEST(Cli, ServeAnswersUntilTerminated) {
  int out[2];
  ASSERT_EQ(pipe(out), 0);
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, out[1], 1);
  posix_spawn_file_actions_addclose(&fa, out[0]);
  std::vector<std::string> args = {WEBTB_CLI, "serve", "--port", "0"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  ASSERT_EQ(posix_spawn(&pid, WEBTB_CLI, &fa, nullptr, argv.data(), environ), 0);
  posix_spawn_file_actions_destroy(&fa);
  close(out[1]);

  std::string url;
  char c = 0;
  while (read(out[0], &c, 1) == 1 && c != '\n') url += c;
  close(out[0]);
  ASSERT_TRUE(url.starts_with("http://127.0.0.1:")) << url;
  const auto port = static_cast<unsigned short>(std::stoi(url.substr(url.rfind(':') + 1)));
  const auto reply = test_support::http_request("127.0.0.1", port, "GET", "/miner?workers=4&throttle=0&interval=1");
  EXPECT_EQ(reply.status, 200);
  EXPECT_NE(reply.body.find("data-workers=\"4\""), std::string::npos);

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}
