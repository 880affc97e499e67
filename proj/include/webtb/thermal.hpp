#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "webtb/monitor.hpp"
#include "webtb/replay.hpp"

namespace webtb::monitors {

class ThermalSource {
 public:
  virtual ~ThermalSource() = default;
  virtual std::vector<std::string> channels() const = 0;
  /// Per-core readings in degrees Celsius.
  virtual std::vector<Reading> read() = 0;
};

/// Reads `temp*_input` files under a hardware-monitoring tree (default /sys/class/hwmon).
/// Core sensors are named "core<N>"; other sensors "<chip>_<label>".
class HwmonThermalSource final : public ThermalSource {
 public:
  /// Returns nullopt when the tree exposes no temperature inputs.
  static std::optional<HwmonThermalSource> discover(const std::filesystem::path& root = "/sys/class/hwmon");

  std::vector<std::string> channels() const override;
  std::vector<Reading> read() override;

 private:
  struct Input {
    std::string channel;
    std::filesystem::path path;
  };
  std::vector<Input> inputs_;
};

class ReplayThermalSource final : public ThermalSource {
 public:
  explicit ReplayThermalSource(ReplayTrace trace) : trace_(std::move(trace)) {}
  std::vector<std::string> channels() const override { return trace_.channels(); }
  std::vector<Reading> read() override { return trace_.next(); }

 private:
  ReplayTrace trace_;
};

class TemperatureMonitor final : public Monitor {
 public:
  explicit TemperatureMonitor(std::unique_ptr<ThermalSource> source);

  const std::string& id() const override { return id_; }
  const std::string& unit() const override { return unit_; }
  const std::vector<std::string>& channels() const override { return channels_; }
  std::vector<Reading> sample() override { return source_->read(); }

 private:
  std::string id_ = "temperature";
  std::string unit_ = "celsius";
  std::unique_ptr<ThermalSource> source_;
  std::vector<std::string> channels_;
};

}  // namespace webtb::monitors
