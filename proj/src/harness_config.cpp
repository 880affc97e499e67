#include "webtb/harness_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "webtb/proc.hpp"
#include "webtb/thermal.hpp"

namespace webtb::harness {

HarnessConfig HarnessConfig::from_json(const nlohmann::json& j) {
  HarnessConfig c;
  if (!j.is_object()) throw std::invalid_argument("harness config must be a JSON object");
  if (j.contains("monitors")) {
    c.monitors.clear();
    for (const auto& m : j.at("monitors")) {
      const auto id = m.get<std::string>();
      if (!kMonitorIds.contains(id)) throw std::invalid_argument("unknown monitor: " + id);
      c.monitors.insert(id);
    }
  }
  if (j.contains("cpu")) c.ranked_threads = j["cpu"].value("ranked_threads", c.ranked_threads);
  if (j.contains("temperature")) {
    const auto& t = j["temperature"];
    c.temperature_source = t.value("source", c.temperature_source);
    c.temperature_replay = t.value("replay", c.temperature_replay);
    c.hwmon_root = t.value("hwmon_root", c.hwmon_root);
    if (c.temperature_source != "hwmon" && c.temperature_source != "replay") {
      throw std::invalid_argument("temperature source must be hwmon or replay");
    }
  }
  if (j.contains("power")) {
    const auto& p = j["power"];
    c.power_source = p.value("source", c.power_source);
    c.power_replay = p.value("replay", c.power_replay);
    c.powercap_root = p.value("powercap_root", c.powercap_root);
    if (c.power_source != "synthetic" && c.power_source != "replay" && c.power_source != "energy_counters") {
      throw std::invalid_argument("power source must be synthetic, replay or energy_counters");
    }
    if (p.contains("rails")) {
      c.power_model.rails.clear();
      for (const auto& [name, rail] : p["rails"].items()) {
        monitors::RailModel m{rail.value("idle_w", 0.0), rail.value("slope_w", 0.0)};
        if (!(m.idle_w >= 0.0) || !(m.idle_w + m.slope_w >= 0.0)) {
          throw std::invalid_argument("rail " + name + " would report negative watts");
        }
        c.power_model.rails[parse_rail(name)] = m;
      }
    }
  }
  if (j.contains("interference")) {
    c.interference_workers = j["interference"].value("workers", c.interference_workers);
    for (int w : c.interference_workers) {
      if (w < 1) throw std::invalid_argument("interference worker counts must be >= 1");
    }
  }
  if (j.contains("cpu_set")) c.cpu_set = proc::parse_cpu_list(j["cpu_set"].get<std::string>());
  c.navigation_timeout_s = j.value("navigation_timeout_s", c.navigation_timeout_s);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.max_network_records = j.value("max_network_records", c.max_network_records);
  if (!(c.navigation_timeout_s > 0.0)) throw std::invalid_argument("navigation timeout must be > 0");
  if (c.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (c.ranked_threads < 0) throw std::invalid_argument("ranked_threads must be >= 0");
  return c;
}

HarnessConfig HarnessConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read harness config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = nlohmann::json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("harness config is not valid JSON: " + path);
  return from_json(j);
}

monitors::Monitor* MonitorSet::find(const std::string& id) const {
  for (const auto& m : sampled) {
    if (m->id() == id) return m.get();
  }
  if (network && id == network->id()) return network.get();
  return nullptr;
}

MonitorSet build_monitors(const HarnessConfig& config) {
  MonitorSet set;
  auto wanted = config.monitors;

  if (wanted.contains("power") && config.power_source == "synthetic" && !wanted.contains("cpu")) {
    wanted.insert("cpu");
    set.warnings.push_back("power: synthetic model needs CPU load; cpu monitor enabled");
  }

  monitors::CpuMonitor* cpu = nullptr;
  if (wanted.contains("cpu")) {
    auto m = std::make_unique<monitors::CpuMonitor>(config.ranked_threads);
    cpu = m.get();
    set.sampled.push_back(std::move(m));
  }
  if (wanted.contains("memory")) set.sampled.push_back(std::make_unique<monitors::MemoryMonitor>());

  if (wanted.contains("temperature")) {
    std::unique_ptr<monitors::ThermalSource> source;
    if (config.temperature_source == "replay") {
      try {
        source = std::make_unique<monitors::ReplayThermalSource>(monitors::ReplayTrace::load(config.temperature_replay));
      } catch (const std::exception& e) {
        set.warnings.push_back(std::string("temperature: disabled, ") + e.what());
      }
    } else if (auto hw = monitors::HwmonThermalSource::discover(config.hwmon_root)) {
      source = std::make_unique<monitors::HwmonThermalSource>(std::move(*hw));
    } else {
      set.warnings.push_back("temperature: disabled, no hardware-monitor sensors under " + config.hwmon_root);
    }
    if (source) set.sampled.push_back(std::make_unique<monitors::TemperatureMonitor>(std::move(source)));
  }

  if (wanted.contains("power")) {
    std::unique_ptr<monitors::PowerTelemetrySource> source;
    if (config.power_source == "synthetic") {
      source = std::make_unique<monitors::SyntheticPowerSource>(config.power_model, [cpu] {
        const double capacity = 100.0 * std::max(1, cpu->cpu_capacity());
        return std::clamp(cpu->latest_total() / capacity, 0.0, 1.0);
      });
    } else if (config.power_source == "replay") {
      try {
        source = std::make_unique<monitors::ReplayPowerSource>(monitors::ReplayTrace::load(config.power_replay));
      } catch (const std::exception& e) {
        set.warnings.push_back(std::string("power: disabled, ") + e.what());
      }
    } else if (auto rapl = monitors::RaplPowerSource::discover(config.powercap_root)) {
      source = std::make_unique<monitors::RaplPowerSource>(std::move(*rapl));
    } else {
      set.warnings.push_back("power: disabled, no energy counters under " + config.powercap_root);
    }
    if (source) set.sampled.push_back(std::make_unique<monitors::PowerMonitor>(std::move(source)));
  }

  if (wanted.contains("network")) set.network = std::make_unique<monitors::NetworkRecorder>(config.max_network_records);
  if (wanted.contains("interference")) {
    set.interference = std::make_unique<monitors::InterferenceBenchmark>(config.cpu_set);
    set.interference_workers = config.interference_workers;
  }
  return set;
}

}  // namespace webtb::harness
