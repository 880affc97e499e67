// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero when any
// criterion fails. Tolerances below are fixed; do not loosen them to make a run pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "acceptance/corpus.hpp"
#include "webtb/browser_driver.hpp"
#include "webtb/fixture_service.hpp"
#include "webtb/harness_config.hpp"
#include "webtb/probe.hpp"
#include "webtb/profit_model.hpp"
#include "webtb/stats.hpp"
#include "webtb/traffic.hpp"

using namespace webtb;
using namespace std::chrono_literals;

namespace {

// Profit model.
constexpr double kRatioRef = 5.5, kRatioTol = 0.10;
constexpr double kBreakEven300Ref = 5.3, kBreakEven300Tol = 0.10;
constexpr double kBreakEven50Ref = 33.1, kBreakEven50Tol = 0.05;
constexpr double kPerMinute227Ref = 0.000409, kPerMinute227Tol = 0.01;
constexpr double kCellularRef = 0.000219, kCellularTol = 0.01;
// Percentiles.
constexpr int kPercentileSeries = 1000;
constexpr double kPercentileRelTol = 1e-12;
// Detector.
constexpr std::size_t kDetectorPages = 50;
constexpr int kMergePermutations = 100;
constexpr double kCoinhiveShare = 0.69, kCryptolootShare = 0.13;
// Harness isolation.
constexpr int kIsolationPairs = 100;
constexpr int kCadenceBelow = 2, kCadenceAbove = 1;
// Desk-scale.
constexpr double kCpuRatioMin = 10.0;
constexpr double kMinerInterferenceMax = 0.7;
constexpr double kAdInterferenceMin = 0.9;
constexpr unsigned kDeskScaleCores = 4;
// Traffic.
constexpr double kTrafficWindowS = 180.0;
constexpr double kTrafficRatioRef = 3.4, kTrafficRatioTol = 0.05;
constexpr double kBitrateRef = 1168.0, kBitrateTol = 0.05;
constexpr double kLedgerAgreementTol = 0.01;
// Revenue cross-check.
constexpr double kRevenueTol = 0.05;
constexpr double kRevenueWindowS = 20.0;
constexpr std::int64_t kHashesPerShare = 200000;

bool within(double value, double ref, double rel_tol) { return std::abs(value - ref) <= rel_tol * std::abs(ref); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

const profit::MiningRateModel kRates{profit::reference::kPayoutPerMHash, profit::reference::kCoinPriceUsd};

// ---------------------------------------------------------------------------------------

Verdict profit_model() {
  using namespace profit;
  Verdict v;
  const AdRateModel ads{reference::kAdSlots, reference::kCpm};
  const TrafficModel traffic{reference::kVisitorsPerMonth, reference::kVisitDurationS};
  const double ad_month = monthly_profit(traffic, AdStrategy{ads});
  const double mine_month = monthly_profit(traffic, MiningStrategy{{300.0, std::nullopt}, kRates});
  const double ratio = ad_month / mine_month;
  v.check(within(ratio, kRatioRef, kRatioTol), fmt::format("ads/mining {:.4g} (ref {} +-10%)", ratio, kRatioRef));

  const double be300 = break_even_duration(ads, {300.0, std::nullopt}, kRates) / 60.0;
  const double be50 = break_even_duration(ads, {50.0, std::nullopt}, kRates) / 60.0;
  v.check(within(be300, kBreakEven300Ref, kBreakEven300Tol), fmt::format("break-even@300 {:.4g} min", be300));
  v.check(within(be50, kBreakEven50Ref, kBreakEven50Tol), fmt::format("break-even@50 {:.4g} min", be50));

  const double per_min = mining_revenue({227.0, std::nullopt}, 60.0, kRates);
  v.check(within(per_min, kPerMinute227Ref, kPerMinute227Tol), fmt::format("227 H/s {:.4g} USD/min", per_min));

  const double cell = cellular_cost(146.0, 60.0, reference::kCellularPricePerByte);
  v.check(within(cell, kCellularRef, kCellularTol), fmt::format("cellular {:.4g} USD/min", cell));
  return v;
}

// ---------------------------------------------------------------------------------------

// Brute-force oracle: full sort, then interpolate between neighbours.
double oracle_percentile(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  const double rank = p / 100.0 * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return xs[lo] + (rank - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

Verdict percentile_oracle() {
  Verdict v;
  std::mt19937_64 rng(20171);
  int mismatches = 0;
  double worst = 0.0;
  for (int s = 0; s < kPercentileSeries; ++s) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 400)(rng);
    std::vector<double> xs(n);
    switch (s % 3) {
      case 0: for (auto& x : xs) x = std::uniform_real_distribution<double>(-1e3, 1e3)(rng); break;
      case 1: for (auto& x : xs) x = std::lognormal_distribution<double>(0.0, 2.0)(rng); break;
      default: for (auto& x : xs) x = std::uniform_int_distribution<int>(0, 5)(rng); break;  // ties
    }
    std::vector<double> points = stats::kDefaultPoints;
    for (int k = 0; k < 5; ++k) points.push_back(std::uniform_real_distribution<double>(0.5, 99.5)(rng));
    const auto table = stats::percentiles(xs, points);
    for (std::size_t k = 0; k < points.size(); ++k) {
      const double want = oracle_percentile(xs, points[k]);
      const double got = table.values[k];
      const double scale = std::max(std::abs(want), std::abs(got));
      const double rel = scale == 0.0 ? 0.0 : std::abs(got - want) / scale;
      worst = std::max(worst, rel);
      if (rel > kPercentileRelTol) ++mismatches;
    }
  }
  v.check(mismatches == 0, fmt::format("{} series, {} mismatches, worst rel err {:.3g}", kPercentileSeries,
                                       mismatches, worst));
  return v;
}

// ---------------------------------------------------------------------------------------

// Oracle for merge: key -> smallest non-empty label, built from raw entries.
std::map<std::string, std::optional<std::string>> union_oracle(const std::vector<detect::Blacklist>& lists) {
  std::map<std::string, std::optional<std::string>> out;
  for (const auto& l : lists) {
    for (const auto& e : l.entries()) {
      const auto key = fmt::format("{}|{}|{}", detect::to_string(e.category), detect::to_string(e.kind), e.pattern);
      auto [it, inserted] = out.try_emplace(key, e.library_label);
      if (!inserted && e.library_label && (!it->second || *e.library_label < *it->second)) it->second = e.library_label;
    }
  }
  return out;
}

Verdict detector() {
  Verdict v;
  const auto corpus = acceptance::make_detector_corpus(kDetectorPages, 2018);
  std::int64_t tp = 0, fp = 0, fn = 0, slot_errors = 0, class_errors = 0;
  for (const auto& planted : corpus.pages) {
    const auto report = detect::classify_page(planted.page, corpus.blacklist);
    const auto libs = report.libraries();
    const std::set<std::string> found(libs.begin(), libs.end());
    for (const auto& l : found) (planted.libraries.contains(l) ? tp : fp) += 1;
    for (const auto& l : planted.libraries) fn += found.contains(l) ? 0 : 1;
    if (report.ad_slot_count != planted.ad_slots) ++slot_errors;
    const bool m = !planted.libraries.empty(), a = planted.ad_slots > 0;
    const auto expected = m && a ? detect::Classification::both
                          : m    ? detect::Classification::miner_supported
                          : a    ? detect::Classification::ad_supported
                                 : detect::Classification::neither;
    if (report.classification != expected) ++class_errors;
  }
  const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  v.check(precision == 1.0 && recall == 1.0 && slot_errors == 0 && class_errors == 0,
          fmt::format("{} pages: P={} R={} ({} planted), slot errors {}, class errors {}", kDetectorPages, precision,
                      recall, tp + fn, slot_errors, class_errors));

  std::mt19937_64 rng(31337);
  auto lists = acceptance::make_overlapping_lists(rng, 12);
  const auto oracle = union_oracle(lists);
  int merge_failures = 0;
  for (int p = 0; p < kMergePermutations; ++p) {
    std::shuffle(lists.begin(), lists.end(), rng);
    const auto merged = detect::merge_blacklists(lists);
    std::map<std::string, std::optional<std::string>> got;
    for (const auto& e : merged.entries()) {
      got[fmt::format("{}|{}|{}", detect::to_string(e.category), detect::to_string(e.kind), e.pattern)] =
          e.library_label;
    }
    if (got != oracle || got.size() != merged.size()) ++merge_failures;
  }
  v.check(merge_failures == 0,
          fmt::format("merge vs union oracle: {} keys, {}/{} permutations differ", oracle.size(), merge_failures,
                      kMergePermutations));

  const auto shares = detect::market_share(acceptance::make_market_share_reports(rng));
  const double coinhive = shares.contains("coinhive") ? shares.at("coinhive") : -1.0;
  const double cryptoloot = shares.contains("cryptoloot") ? shares.at("cryptoloot") : -1.0;
  v.check(coinhive == kCoinhiveShare && cryptoloot == kCryptolootShare,
          fmt::format("market share coinhive={} cryptoloot={}", coinhive, cryptoloot));
  return v;
}

// ---------------------------------------------------------------------------------------

/// Records the page title seen right after every state-test load.
class ObservingDriver final : public BrowserDriver {
 public:
  explicit ObservingDriver(BrowserDriver& inner) : inner_(inner) {}

  void start() override { inner_.start(); }
  void stop() override { inner_.stop(); }
  void restart() override { inner_.restart(); }
  bool running() const override { return inner_.running(); }
  pid_t browser_pid() const override { return inner_.browser_pid(); }
  nlohmann::json metadata() const override { return inner_.metadata(); }
  NavigationResult navigate(const std::string& url, std::chrono::milliseconds timeout) override {
    auto r = inner_.navigate(url, timeout);
    if (r.ok && url.find("/state-test") != std::string::npos) observed.push_back(inner_.title());
    return r;
  }
  void purge_state() override { inner_.purge_state(); }
  nlohmann::json evaluate(const std::string& expression) override { return inner_.evaluate(expression); }
  std::vector<std::string> cookie_names() override { return inner_.cookie_names(); }
  std::vector<std::string> service_worker_scopes() override { return inner_.service_worker_scopes(); }
  int subscribe(cdp::EventHandler handler) override { return inner_.subscribe(std::move(handler)); }
  void unsubscribe(int token) override { inner_.unsubscribe(token); }

  std::vector<std::string> observed;

 private:
  BrowserDriver& inner_;
};

harness::MonitorSet monitor_set(std::set<std::string> ids, std::vector<int> interference_workers = {1}) {
  harness::HarnessConfig hc;
  hc.monitors = std::move(ids);
  hc.interference_workers = std::move(interference_workers);
  return harness::build_monitors(hc);
}

harness::ProbeConfig probe_config(const std::string& url, double phase1_s, double interval_s,
                                  std::set<std::string> ids, double phase2_s = 0.0) {
  harness::ProbeConfig c;
  c.target_url = url;
  c.phase1_duration_s = phase1_s;
  c.phase2_duration_s = phase2_s > 0.0 ? phase2_s : std::max(interval_s, 1.0);
  c.sample_interval_s = interval_s;
  c.enabled_monitors = std::move(ids);
  c.navigation_timeout = 30s;
  return c;
}

std::size_t sample_count(const ProbeResult& r, const std::string& monitor) {
  const auto* s = r.series(monitor);
  return s ? s->timestamps().size() : 0;
}

bool cadence_ok(std::size_t samples, double phase_s, double interval_s) {
  const auto n = static_cast<long>(std::llround(phase_s / interval_s));
  const auto got = static_cast<long>(samples);
  return got >= n - kCadenceBelow && got <= n + kCadenceAbove;
}

Verdict harness_isolation(const std::string& base) {
  Verdict v;
  CdpBrowserDriver browser(mock_launch(WEBTB_MOCK_BROWSER));
  ObservingDriver driver(browser);
  driver.start();
  driver.purge_state();
  auto monitors = monitor_set({"network"});
  const auto cfg = probe_config(base + "/state-test", 0.2, 0.1, {"network"});
  int failed = 0, residue = 0;
  for (int i = 0; i < 2 * kIsolationPairs; ++i) {
    const auto r = harness::run_probe(cfg, driver, monitors);
    if (!r.ok) ++failed;
    // Second route: the browser's own storage views after the probe's purge.
    if (!browser.cookie_names().empty() || !browser.service_worker_scopes().empty()) ++residue;
  }
  const auto leaks = std::count_if(driver.observed.begin(), driver.observed.end(),
                                   [](const std::string& t) { return t != "found:none"; });
  const auto expected = static_cast<std::size_t>(2 * kIsolationPairs);
  v.check(failed == 0 && driver.observed.size() == expected && leaks == 0 && residue == 0,
          fmt::format("{} probe pairs: {} observations, {} leaks, {} post-purge residues, {} failed probes",
                      kIsolationPairs, driver.observed.size(), leaks, residue, failed));

  auto sampled = monitor_set({"cpu", "memory"});
  std::vector<std::string> cadence;
  bool cadence_pass = true;
  for (double n : {5.0, 10.0, 20.0}) {
    const auto r = harness::run_probe(probe_config(base + "/control", n, 1.0, {"cpu", "memory"}), driver, sampled);
    for (const auto* id : {"cpu", "memory"}) {
      const auto count = sample_count(r, id);
      const bool ok = r.ok && cadence_ok(count, n, 1.0);
      cadence_pass = cadence_pass && ok;
      cadence.push_back(fmt::format("{}@{}s={}", id, n, count));
    }
  }
  std::string joined;
  for (const auto& c : cadence) joined += (joined.empty() ? "" : " ") + c;
  v.check(cadence_pass, fmt::format("cadence in [N-{}, N+{}]: {}", kCadenceBelow, kCadenceAbove, joined));
  driver.stop();
  return v;
}

// ---------------------------------------------------------------------------------------

struct TrafficRun {
  ProbeResult probe;
  traffic::TrafficSummary summary;
};

TrafficRun traffic_probe(const std::string& url) {
  CdpBrowserDriver driver(mock_launch(WEBTB_MOCK_BROWSER));
  driver.start();
  driver.purge_state();
  auto monitors = monitor_set({"cpu", "network"});
  TrafficRun run;
  run.probe = harness::run_probe(probe_config(url, kTrafficWindowS, 1.0, {"cpu", "network"}), driver, monitors);
  run.summary = traffic::summarize(run.probe, fixture::fixture_blacklist());
  driver.stop();
  return run;
}

bool bytes_conserved(const TrafficRun& run) {
  std::int64_t raw = 0;
  for (const auto& r : run.probe.requests) raw += r.transferred_bytes;
  for (const auto& f : run.probe.frames) raw += f.payload_bytes;
  return raw == run.summary.total_bytes();
}

Verdict traffic_pipeline(std::vector<std::string>& cadence_notes, bool& cadence_pass) {
  Verdict v;
  fixture::FixtureService calibrated(fixture::FixtureConfig{});
  fixture::FixtureService spread(fixture::FixtureConfig{});
  // Miner: 89 shares of 183 B and 90 jobs of 72 B over the window (22767 B). The 2.01 s
  // period keeps the last share 0.9 s clear of the window edge.
  const auto miner_url = calibrated.base_url() + "/miner?workers=1&throttle=0.9&interval=2.01&frame_size=183";
  // Ads: three slots whose header plus body come to 2233 B each (6699 B).
  const auto slot_body = 2233 - fixture::response_header_bytes("image/gif", 2233, false);
  const auto ads_url = calibrated.base_url() + fmt::format("/ads?slots=3&size={}", slot_body);
  // Bitrate corpus: 24 shares and 25 jobs per window; the middle site carries 26280 B
  // (146 B/s), the outer sites 16200 B and 37800 B.
  std::vector<std::string> spread_urls;
  for (int frame : {600, 1020, 1500}) {
    spread_urls.push_back(spread.base_url() +
                          fmt::format("/miner?workers=1&throttle=0.9&interval=7.45&frame_size={}", frame));
  }
  calibrated.reset_ledger();

  std::vector<std::future<TrafficRun>> jobs;
  jobs.push_back(std::async(std::launch::async, traffic_probe, miner_url));
  jobs.push_back(std::async(std::launch::async, traffic_probe, ads_url));
  for (const auto& u : spread_urls) jobs.push_back(std::async(std::launch::async, traffic_probe, u));
  std::vector<TrafficRun> runs;
  for (auto& j : jobs) runs.push_back(j.get());
  const auto ledger = calibrated.ledger().totals();

  bool all_ok = true;
  bool conserved = true;
  for (const auto& r : runs) {
    all_ok = all_ok && r.probe.ok;
    conserved = conserved && bytes_conserved(r);
    const auto count = sample_count(r.probe, "cpu");
    cadence_pass = cadence_pass && cadence_ok(count, kTrafficWindowS, 1.0);
    cadence_notes.push_back(fmt::format("cpu@{}s={}", kTrafficWindowS, count));
  }
  v.check(all_ok, fmt::format("{} probes ok", all_ok ? "all" : "not all"));

  const auto& miner = runs[0].summary;
  const auto& ads = runs[1].summary;
  const double ratio = ads.ad_bytes > 0 ? static_cast<double>(miner.miner_bytes) / static_cast<double>(ads.ad_bytes) : 0.0;
  v.check(within(ratio, kTrafficRatioRef, kTrafficRatioTol),
          fmt::format("miner {} B / ad {} B = {:.4g} (ref {} +-5%)", miner.miner_bytes, ads.ad_bytes, ratio,
                      kTrafficRatioRef));

  std::vector<traffic::TrafficSummary> corpus;
  for (std::size_t i = 2; i < runs.size(); ++i) corpus.push_back(runs[i].summary);
  const auto dist = traffic::bitrate_distribution(corpus);
  v.check(within(dist.median(), kBitrateRef, kBitrateTol),
          fmt::format("median bitrate {:.5g} bit/s (ref {} +-5%)", dist.median(), kBitrateRef));
  v.check(conserved, "byte conservation exact");

  const double ledger_bytes = static_cast<double>(ledger.payload_bytes());
  v.check(miner.miner_bytes > 0 && within(ledger_bytes, static_cast<double>(miner.miner_bytes), kLedgerAgreementTol),
          fmt::format("ledger {} B vs analyzer {} B", ledger.payload_bytes(), miner.miner_bytes));
  return v;
}

// ---------------------------------------------------------------------------------------

Verdict revenue_crosscheck() {
  Verdict v;
  fixture::FixtureService service(fixture::FixtureConfig{});
  CdpBrowserDriver driver(mock_launch(WEBTB_MOCK_BROWSER));
  driver.start();
  driver.purge_state();
  service.reset_ledger();
  const auto nav =
      driver.navigate(service.base_url() + fmt::format("/miner?workers=1&throttle=0&hps={}", kHashesPerShare), 30s);
  if (!nav.ok) {
    v.check(false, "miner page failed to load: " + nav.error);
    return v;
  }
  std::this_thread::sleep_for(std::chrono::duration<double>(kRevenueWindowS));
  const auto stats = driver.evaluate("window.__webtbMiner");
  const auto ledger = service.ledger();
  driver.purge_state();
  driver.stop();

  // Route 1: what the stub credited. Route 2: the model fed the page's effective rate.
  const double credited = fixture::revenue_crosscheck(ledger, kRates, kHashesPerShare);
  const double elapsed = stats.value("elapsed_s", 0.0);
  const double hashes = stats.value("hashes", 0.0);
  const double modelled = elapsed > 0.0 ? profit::mining_revenue({hashes / elapsed, std::nullopt}, elapsed, kRates) : 0.0;
  v.check(modelled > 0.0 && within(credited, modelled, kRevenueTol),
          fmt::format("ledger {:.4g} USD ({} shares) vs model {:.4g} USD ({:.4g} H/s over {:.3g} s)", credited,
                      ledger.totals().accepted, modelled, elapsed > 0.0 ? hashes / elapsed : 0.0, elapsed));
  return v;
}

// ---------------------------------------------------------------------------------------

double cpu_mean(const ProbeResult& r) {
  const auto* s = r.series("cpu");
  return s ? s->mean("total").value_or(0.0) : 0.0;
}

Verdict desk_scale(const std::string& base) {
  Verdict v;
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  CdpBrowserDriver driver(mock_launch(WEBTB_MOCK_BROWSER));
  driver.start();

  auto monitors = monitor_set({"cpu", "interference"}, {1});
  const auto templ = probe_config("", 10.0, 1.0, {"cpu", "interference"}, 5.0);
  const auto results = harness::run_campaign(
      {base + "/control", base + "/miner?workers=4&throttle=0", base + "/ads?slots=3"}, templ, driver, monitors);
  const auto& control = results[0];
  const auto& miner = results[1];
  const auto& ads = results[2];
  const bool ok = control.ok && miner.ok && ads.ok;
  v.check(ok, ok ? "probes ok" : "probe failed: " + control.error + miner.error + ads.error);

  const double c_ctl = cpu_mean(control), c_min = cpu_mean(miner);
  v.check(c_min > 0.0 && c_min >= kCpuRatioMin * c_ctl,
          fmt::format("cpu miner {:.4g}% vs control {:.4g}% (need >= {}x)", c_min, c_ctl, kCpuRatioMin));
  const double i_min = miner.interference(1) ? miner.interference(1)->ratio() : -1.0;
  const double i_ads = ads.interference(1) ? ads.interference(1)->ratio() : -1.0;
  v.check(i_min >= 0.0 && i_min <= kMinerInterferenceMax, fmt::format("interference miner {:.3g}", i_min));
  v.check(i_ads >= kAdInterferenceMin, fmt::format("interference ads {:.3g}", i_ads));

  // Scaling is only meaningful up to the core count; the idle page anchors the series.
  std::vector<int> workers = {0};
  for (int w : {1, 2, 4}) {
    if (static_cast<unsigned>(w) <= cores) workers.push_back(w);
  }
  auto net = monitor_set({"cpu", "network"});
  std::vector<double> cpu, share_rate;
  std::string series;
  for (int w : workers) {
    const auto r = harness::run_probe(
        probe_config(base + fmt::format("/miner?workers={}&throttle=0&hps={}", w, kHashesPerShare / 4), 8.0, 1.0,
                     {"cpu", "network"}),
        driver, net);
    const auto shares = std::count_if(r.frames.begin(), r.frames.end(), [](const WsFrameRecord& f) {
      return f.direction == WsFrameRecord::Direction::sent;
    });
    cpu.push_back(cpu_mean(r));
    share_rate.push_back(static_cast<double>(shares) / r.phase1_duration_s);
    series += fmt::format(" w{}:cpu={:.3g}%,shares={:.3g}/s", w, cpu.back(), share_rate.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < workers.size(); ++i) {
    monotone = monotone && cpu[i] > cpu[i - 1] && share_rate[i] > share_rate[i - 1];
  }
  v.check(monotone, "monotone scaling" + series);
  if (cores < kDeskScaleCores) {
    v.detail += fmt::format("; note: host has {} core(s) (<{}), scaling checked over workers <= cores", cores,
                            kDeskScaleCores);
  }
  driver.stop();
  return v;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  int failures = 0;
  auto report = [&](const std::string& name, const std::function<Verdict()>& run) {
    const auto started = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail += std::string(v.detail.empty() ? "" : "; ") + "exception: " + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("%s %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    if (!v.pass) ++failures;
  };

  fixture::FixtureService service(fixture::FixtureConfig{});
  const auto base = service.base_url();

  report("profit-model", profit_model);
  report("percentile-oracle", percentile_oracle);
  report("detector", detector);

  std::vector<std::string> cadence_notes;
  bool cadence_pass = true;
  Verdict traffic;
  report("traffic-pipeline", [&] {
    traffic = traffic_pipeline(cadence_notes, cadence_pass);
    return traffic;
  });
  report("harness-isolation", [&] {
    auto v = harness_isolation(base);
    std::string joined;
    for (const auto& c : cadence_notes) joined += (joined.empty() ? "" : " ") + c;
    v.check(cadence_pass, "cadence on traffic probes: " + joined);
    return v;
  });
  report("revenue-crosscheck", revenue_crosscheck);
  report("desk-scale", [&] { return desk_scale(base); });
  return failures == 0 ? 0 : 1;
}
