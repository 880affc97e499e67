#pragma once

// Two-phase probe of one target page and sequential campaigns over many targets.
//
// Phase 1: monitors start, the page is loaded, and every sampled monitor is read at
// t = k * interval (k = 1..) on its own thread until the phase ends. Readings funnel
// through one collector. Then all browser state is purged.
// Phase 2 (interference enabled only): for each worker count, re-load the page with no
// other monitor running, run the benchmark for phase2_duration, purge.

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "webtb/browser_driver.hpp"
#include "webtb/harness_config.hpp"
#include "webtb/records.hpp"

namespace webtb::harness {

class ResultsSink;

struct ProbeConfig {
  std::string target_url;
  double phase1_duration_s = 180.0;
  double phase2_duration_s = 60.0;
  double sample_interval_s = 1.0;
  std::set<std::string> enabled_monitors{"cpu", "memory", "network"};
  std::string output_dir;
  std::chrono::milliseconds navigation_timeout{30'000};
  int max_retries = 1;
  std::vector<int> cpu_set;
};

/// Throws std::invalid_argument when durations or the interval are out of range.
void validate(const ProbeConfig& config);

/// Never throws for navigation failures or browser crashes; those are recorded in the
/// result. Throws webtb::PurgeError when state cannot be cleared.
ProbeResult run_probe(const ProbeConfig& config, BrowserDriver& driver, MonitorSet& monitors);

/// Called after each probe with its index; the sink (when given) has already stored it.
using ProbeObserver = std::function<void(std::size_t index, const ProbeResult&)>;

/// Probes targets strictly one after another. Calibrates missing interference
/// baselines first. A purge failure aborts the campaign (rethrown).
std::vector<ProbeResult> run_campaign(const std::vector<std::string>& targets, const ProbeConfig& templ,
                                      BrowserDriver& driver, MonitorSet& monitors, ResultsSink* sink = nullptr,
                                      const ProbeObserver& observer = {});

}  // namespace webtb::harness
