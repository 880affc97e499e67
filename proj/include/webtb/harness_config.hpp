#pragma once

// Harness configuration file (JSON) and the monitor set it selects.
//
// {
//   "monitors": ["cpu", "memory", "temperature", "network", "power", "interference"],
//   "cpu": {"ranked_threads": 8},
//   "temperature": {"source": "hwmon" | "replay", "hwmon_root": "...", "replay": "file.csv"},
//   "power": {"source": "synthetic" | "replay" | "energy_counters", "replay": "file.csv",
//             "powercap_root": "...", "rails": {"rail_12v_a": {"idle_w": 32.4, "slope_w": 35.2}}},
//   "interference": {"workers": [1, 2, 4]},
//   "cpu_set": "0-3",
//   "navigation_timeout_s": 30,
//   "max_retries": 1,
//   "max_network_records": 1000000
// }

#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "webtb/cpu_monitor.hpp"
#include "webtb/interference.hpp"
#include "webtb/network_recorder.hpp"
#include "webtb/power.hpp"

namespace webtb::harness {

inline const std::set<std::string> kMonitorIds{"cpu", "memory", "temperature", "network", "power", "interference"};

struct HarnessConfig {
  std::set<std::string> monitors{"cpu", "memory", "network"};
  int ranked_threads = 8;
  std::string temperature_source = "hwmon";
  std::string temperature_replay;
  std::string hwmon_root = "/sys/class/hwmon";
  std::string power_source = "synthetic";
  std::string power_replay;
  std::string powercap_root = "/sys/class/powercap";
  monitors::SyntheticPowerModel power_model = monitors::SyntheticPowerModel::reference();
  std::vector<int> interference_workers{1, 2, 4};
  std::vector<int> cpu_set;
  double navigation_timeout_s = 30.0;
  int max_retries = 1;
  std::size_t max_network_records = 1'000'000;

  /// Throws std::invalid_argument on unknown monitors or out-of-range values.
  static HarnessConfig from_json(const nlohmann::json& j);
  static HarnessConfig load(const std::string& path);
};

/// Monitors instantiated for a campaign. `sampled` run on the phase-1 cadence;
/// the network recorder and the interference benchmark are driven by the harness.
struct MonitorSet {
  std::vector<std::unique_ptr<monitors::Monitor>> sampled;
  std::unique_ptr<monitors::NetworkRecorder> network;
  std::unique_ptr<monitors::InterferenceBenchmark> interference;
  std::vector<int> interference_workers;
  /// Monitors that were requested but disabled (missing sensor, unreadable replay).
  std::vector<std::string> warnings;

  monitors::Monitor* find(const std::string& id) const;
};

MonitorSet build_monitors(const HarnessConfig& config);

}  // namespace webtb::harness
