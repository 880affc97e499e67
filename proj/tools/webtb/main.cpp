// webtb: revenue simulation, blacklist detection, page probing, reporting and the
// fixture service behind one command line.

#include <signal.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "webtb/browser_driver.hpp"
#include "webtb/detector.hpp"
#include "webtb/fixture_service.hpp"
#include "webtb/harness_config.hpp"
#include "webtb/probe.hpp"
#include "webtb/probe_report.hpp"
#include "webtb/proc.hpp"
#include "webtb/report.hpp"
#include "webtb/results_io.hpp"
#include "webtb/scenario.hpp"
#include "webtb/traffic.hpp"
#include "webtb/url.hpp"

namespace fs = std::filesystem;
using namespace webtb;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw std::runtime_error(path + " is not valid JSON");
  return j;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = std::string(trim(item));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<std::string> read_targets(const std::string& path) {
  std::vector<std::string> targets;
  std::stringstream ss(read_file(path));
  std::string line;
  while (std::getline(ss, line)) {
    const auto t = std::string(trim(line));
    if (!t.empty() && t.front() != '#') targets.push_back(t);
  }
  return targets;
}

detect::Blacklist load_lists(const std::vector<std::string>& miner_lists, const std::vector<std::string>& ad_lists) {
  std::vector<detect::Blacklist> lists;
  for (const auto& f : miner_lists) {
    lists.push_back(detect::load_blacklist(f, detect::sniff_format(read_file(f)), detect::Category::miner));
  }
  for (const auto& f : ad_lists) {
    lists.push_back(detect::load_blacklist(f, detect::sniff_format(read_file(f)), detect::Category::ad));
  }
  return detect::merge_blacklists(lists);
}

void write_or_print(const std::string& out_dir, const std::string& name, const std::string& content) {
  if (out_dir.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(out_dir);
  stats::write_file_atomic(fs::path(out_dir) / name, content);
  std::cerr << "wrote " << (fs::path(out_dir) / name).string() << "\n";
}

// ---- simulate ----

struct SimulateArgs {
  std::string config;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto scenario = a.config.empty() ? profit::Scenario{} : profit::Scenario::from_json(read_json(a.config));
  const auto revenue = profit::render_revenue_csv(scenario);
  const auto break_even = profit::render_break_even_csv(scenario);
  if (a.out.empty()) {
    std::cout << revenue << "\n" << break_even;
  } else {
    write_or_print(a.out, "revenue.csv", revenue);
    write_or_print(a.out, "break_even.csv", break_even);
  }
  return 0;
}

// ---- detect ----

struct DetectArgs {
  std::vector<std::string> miner_lists;
  std::vector<std::string> ad_lists;
  std::string snapshots;
  std::string out;
};

int cmd_detect(const DetectArgs& a) {
  const auto bl = load_lists(a.miner_lists, a.ad_lists);
  std::cerr << fmt::format("merged blacklist: {} unique entries from {} source(s)\n", bl.size(),
                           bl.source_names().size());
  std::string jsonl;
  std::vector<detect::DetectionReport> reports;
  for (const auto& page : detect::load_snapshots(a.snapshots)) {
    reports.push_back(detect::classify_page(page, bl));
    jsonl += nlohmann::json(reports.back()).dump() + "\n";
  }
  std::string share_csv = "library,share\n";
  for (const auto& [lib, share] : detect::market_share(reports)) {
    share_csv += fmt::format("{},{}\n", lib, stats::format_sig4(share));
  }
  if (a.out.empty()) {
    std::cout << jsonl << "\n" << share_csv;
  } else {
    write_or_print(a.out, "detections.jsonl", jsonl);
    write_or_print(a.out, "market_share.csv", share_csv);
  }
  return 0;
}

// ---- probe ----

struct ProbeArgs {
  std::string targets;
  double duration = 180.0;
  double phase2_duration = 60.0;
  double interval = 1.0;
  std::string monitors;
  std::string out;
  std::string config;
  std::string browser = "auto";
  std::string cpu_set;
};

std::string sibling_executable(const std::string& name) {
  std::error_code ec;
  const auto self = fs::read_symlink("/proc/self/exe", ec);
  return ec ? name : (self.parent_path() / name).string();
}

LaunchSpec launch_spec(const std::string& browser, const std::vector<int>& cpu_set) {
  if (browser == "mock") return mock_launch(sibling_executable("webtb-mock-browser"), cpu_set);
  if (browser == "auto" || browser == "chromium") {
    const auto found = find_chromium();
    if (!found.empty()) return chromium_launch(found, cpu_set);
    if (browser == "chromium") throw std::runtime_error("no Chromium-family browser found (set WEBTB_CHROMIUM)");
    std::cerr << "no Chromium-family browser found; using the mock browser\n";
    return mock_launch(sibling_executable("webtb-mock-browser"), cpu_set);
  }
  if (fs::path(browser).filename().string().starts_with("webtb-mock-browser")) return mock_launch(browser, cpu_set);
  return chromium_launch(browser, cpu_set);
}

int cmd_probe(const ProbeArgs& a) {
  auto hc = a.config.empty() ? harness::HarnessConfig{} : harness::HarnessConfig::load(a.config);
  if (!a.monitors.empty()) {
    hc.monitors.clear();
    for (const auto& m : split_list(a.monitors)) {
      if (!harness::kMonitorIds.contains(m)) throw CLI::ValidationError("--monitors", "unknown monitor " + m);
      hc.monitors.insert(m);
    }
  }
  if (!a.cpu_set.empty()) hc.cpu_set = proc::parse_cpu_list(a.cpu_set);

  harness::ProbeConfig templ;
  templ.phase1_duration_s = a.duration;
  templ.phase2_duration_s = a.phase2_duration;
  templ.sample_interval_s = a.interval;
  templ.enabled_monitors = hc.monitors;
  templ.output_dir = a.out;
  templ.navigation_timeout = std::chrono::milliseconds(static_cast<long>(hc.navigation_timeout_s * 1000));
  templ.max_retries = hc.max_retries;
  templ.cpu_set = hc.cpu_set;
  harness::validate(templ);

  const auto targets = read_targets(a.targets);
  if (targets.empty()) throw std::runtime_error("no targets in " + a.targets);

  auto monitors = harness::build_monitors(hc);
  for (const auto& w : monitors.warnings) std::cerr << "warning: " << w << "\n";
  templ.enabled_monitors.clear();
  for (const auto& m : monitors.sampled) templ.enabled_monitors.insert(m->id());
  if (monitors.network) templ.enabled_monitors.insert("network");
  if (monitors.interference) templ.enabled_monitors.insert("interference");

  CdpBrowserDriver driver(launch_spec(a.browser, hc.cpu_set));
  driver.start();
  nlohmann::json meta{{"targets", targets},
                      {"phase1_duration_s", templ.phase1_duration_s},
                      {"phase2_duration_s", templ.phase2_duration_s},
                      {"sample_interval_s", templ.sample_interval_s},
                      {"monitors", templ.enabled_monitors},
                      {"warnings", monitors.warnings},
                      {"browser", driver.metadata()}};
  harness::ResultsSink sink(a.out, meta);
  int failed = 0;
  harness::run_campaign(targets, templ, driver, monitors, &sink, [&](std::size_t i, const ProbeResult& r) {
    if (!r.ok) ++failed;
    std::cerr << fmt::format("[{}/{}] {} {}{}\n", i + 1, targets.size(), r.ok ? "ok  " : "FAIL", r.target_url,
                             r.ok ? "" : " (" + r.error + ")");
  });
  driver.stop();
  std::cerr << fmt::format("{} probe(s), {} failed; results in {}\n", targets.size(), failed, a.out);
  return 0;
}

// ---- report / traffic ----

struct ReportArgs {
  std::vector<std::string> in;
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
  std::string out;
  std::string format = "csv";
};

std::vector<ProbeResult> load_dirs(const std::vector<std::string>& dirs) {
  std::vector<fs::path> paths(dirs.begin(), dirs.end());
  return harness::load_results(paths);
}

int cmd_report(const ReportArgs& a) {
  std::vector<stats::PercentileTable> tables;
  if (!a.in.empty()) tables = stats::corpus_tables(load_dirs(a.in));
  std::vector<stats::ComparisonRow> rows;
  if (!a.group_a.empty() || !a.group_b.empty()) {
    if (a.group_a.empty() || a.group_b.empty()) {
      throw CLI::ValidationError("--group-a/--group-b", "both groups are needed for a comparison");
    }
    const auto ga = load_dirs(a.group_a);
    const auto gb = load_dirs(a.group_b);
    rows = stats::compare_probe_corpora(ga, gb);
    if (a.in.empty()) {
      auto ta = stats::corpus_tables(ga, "a.");
      auto tb = stats::corpus_tables(gb, "b.");
      tables.insert(tables.end(), ta.begin(), ta.end());
      tables.insert(tables.end(), tb.begin(), tb.end());
    }
  }
  const auto fmt_kind = a.format == "json" ? stats::ReportFormat::json : stats::ReportFormat::csv;
  for (const auto& p : stats::emit_report(tables, rows, fmt_kind, a.out)) std::cerr << "wrote " << p.string() << "\n";
  return 0;
}

struct TrafficArgs {
  std::vector<std::string> in;
  std::vector<std::string> miner_lists;
  std::vector<std::string> ad_lists;
  std::string out;
};

int cmd_traffic(const TrafficArgs& a) {
  const auto bl = a.miner_lists.empty() && a.ad_lists.empty() ? fixture::fixture_blacklist()
                                                              : load_lists(a.miner_lists, a.ad_lists);
  std::vector<traffic::TrafficSummary> summaries;
  for (const auto& p : load_dirs(a.in)) {
    if (p.ok) summaries.push_back(traffic::summarize(p, bl));
  }
  if (summaries.empty()) throw std::runtime_error("no successful probes to analyze");
  write_or_print(a.out, "traffic_summaries.csv", traffic::render_summaries_csv(summaries));
  write_or_print(a.out, "bitrate_distribution.csv",
                 stats::render_percentiles_csv({traffic::bitrate_distribution(summaries)}));
  return 0;
}

// ---- serve ----

struct ServeArgs {
  std::string config;
  std::string bind = "127.0.0.1";
  unsigned short port = 8080;
};

int cmd_serve(const ServeArgs& a) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  auto cfg = a.config.empty() ? fixture::FixtureConfig{} : fixture::fixture_config_from_json(read_json(a.config));
  cfg.bind_address = a.bind;
  cfg.port = a.port;
  fixture::FixtureService service(cfg);
  std::cout << service.base_url() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Web page resource-cost measurement and monetization modeling"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Revenue and break-even tables for a scenario");
  s->add_option("--config", sim.config, "Scenario JSON file")->check(CLI::ExistingFile);
  s->add_option("--out", sim.out, "Output directory (default: stdout)");

  DetectArgs det;
  auto* d = app.add_subcommand("detect", "Classify page snapshots against merged blacklists");
  d->add_option("--miner-lists", det.miner_lists, "Miner blacklist files")->check(CLI::ExistingFile);
  d->add_option("--ad-lists", det.ad_lists, "Ad blacklist files")->check(CLI::ExistingFile);
  d->add_option("--snapshots", det.snapshots, "Directory of page snapshot JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  d->add_option("--out", det.out, "Output directory (default: stdout)");

  ProbeArgs pr;
  auto* p = app.add_subcommand("probe", "Run a sequential two-phase measurement campaign");
  p->add_option("--targets", pr.targets, "File with one URL per line")->required()->check(CLI::ExistingFile);
  p->add_option("--duration", pr.duration, "Phase-1 seconds")->check(CLI::PositiveNumber);
  p->add_option("--phase2-duration", pr.phase2_duration, "Phase-2 seconds per worker count")
      ->check(CLI::PositiveNumber);
  p->add_option("--interval", pr.interval, "Sampling interval in seconds")->check(CLI::PositiveNumber);
  p->add_option("--monitors", pr.monitors, "Comma-separated monitor ids");
  p->add_option("--out", pr.out, "Results directory")->required();
  p->add_option("--config", pr.config, "Harness config JSON")->check(CLI::ExistingFile);
  p->add_option("--browser", pr.browser, "auto, chromium, mock, or an executable path");
  p->add_option("--cpu-set", pr.cpu_set, "CPUs for the browser and benchmark, e.g. 0-3");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Percentile tables and corpus comparisons from probe results");
  r->add_option("--in", rep.in, "Probe result directories")->check(CLI::ExistingDirectory);
  r->add_option("--group-a", rep.group_a, "Baseline corpus directories")->check(CLI::ExistingDirectory);
  r->add_option("--group-b", rep.group_b, "Compared corpus directories")->check(CLI::ExistingDirectory);
  r->add_option("--out", rep.out, "Output directory")->required();
  r->add_option("--format", rep.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  TrafficArgs tr;
  auto* t = app.add_subcommand("traffic", "Miner/ad/other traffic split and bitrate distribution");
  t->add_option("--in", tr.in, "Probe result directories")->required()->check(CLI::ExistingDirectory);
  t->add_option("--miner-lists", tr.miner_lists, "Miner blacklist files (default: fixture lists)")
      ->check(CLI::ExistingFile);
  t->add_option("--ad-lists", tr.ad_lists, "Ad blacklist files")->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "Output directory (default: stdout)");

  ServeArgs sv;
  auto* v = app.add_subcommand("serve", "Serve the fixture corpus and proof-of-work stub");
  v->add_option("--config", sv.config, "Fixture config JSON")->check(CLI::ExistingFile);
  v->add_option("--bind", sv.bind, "Listen address");
  v->add_option("--port", sv.port, "Listen port (0: ephemeral)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (d->parsed()) return cmd_detect(det);
    if (p->parsed()) return cmd_probe(pr);
    if (r->parsed()) return cmd_report(rep);
    if (t->parsed()) return cmd_traffic(tr);
    if (v->parsed()) return cmd_serve(sv);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
