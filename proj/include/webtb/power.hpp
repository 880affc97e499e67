#pragma once

// Power telemetry per supply rail. Sources: a replay trace, the kernel's RAPL energy
// counters, or an affine model driven by the measured CPU load.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "webtb/monitor.hpp"
#include "webtb/records.hpp"
#include "webtb/replay.hpp"

namespace webtb::monitors {

class PowerTelemetrySource {
 public:
  virtual ~PowerTelemetrySource() = default;
  virtual std::vector<Rail> rails() const = 0;
  /// One sample per configured rail; `t` is filled in by the caller.
  virtual std::vector<PowerSample> read() = 0;
};

/// watts = idle_w + slope_w * cpu_fraction, cpu_fraction clamped to [0, 1].
struct RailModel {
  double idle_w = 0.0;
  double slope_w = 0.0;
  double watts(double cpu_fraction) const;
};

struct SyntheticPowerModel {
  std::map<Rail, RailModel> rails;

  /// CPU + network adapter rail and memory rail, calibrated so that an idle page and a
  /// saturating miner land on the reference medians (32.4 W / 67.6 W and 4.46 W / 4.99 W).
  static SyntheticPowerModel reference();
};

class SyntheticPowerSource final : public PowerTelemetrySource {
 public:
  /// `cpu_fraction` reports the current load of the measured process tree in [0, 1].
  SyntheticPowerSource(SyntheticPowerModel model, std::function<double()> cpu_fraction);
  std::vector<Rail> rails() const override;
  std::vector<PowerSample> read() override;

 private:
  SyntheticPowerModel model_;
  std::function<double()> cpu_fraction_;
};

class ReplayPowerSource final : public PowerTelemetrySource {
 public:
  /// Trace channels must be rail names.
  explicit ReplayPowerSource(ReplayTrace trace);
  std::vector<Rail> rails() const override { return rails_; }
  std::vector<PowerSample> read() override;

 private:
  ReplayTrace trace_;
  std::vector<Rail> rails_;
};

/// Average power between reads from powercap energy counters: the package domain
/// maps to the CPU rail, the dram subdomain to the memory rail.
class RaplPowerSource final : public PowerTelemetrySource {
 public:
  static std::optional<RaplPowerSource> discover(const std::filesystem::path& root = "/sys/class/powercap");
  std::vector<Rail> rails() const override;
  std::vector<PowerSample> read() override;

 private:
  struct Counter {
    Rail rail;
    std::filesystem::path energy_uj;
    std::uint64_t max_range_uj = 0;
    std::uint64_t last_uj = 0;
  };
  std::vector<Counter> counters_;
  std::chrono::steady_clock::time_point last_at_;
};

class PowerMonitor final : public Monitor {
 public:
  explicit PowerMonitor(std::unique_ptr<PowerTelemetrySource> source);

  const std::string& id() const override { return id_; }
  const std::string& unit() const override { return unit_; }
  const std::vector<std::string>& channels() const override { return channels_; }
  std::vector<Reading> sample() override;

 private:
  std::string id_ = "power";
  std::string unit_ = "watts";
  std::unique_ptr<PowerTelemetrySource> source_;
  std::vector<std::string> channels_;
};

}  // namespace webtb::monitors
