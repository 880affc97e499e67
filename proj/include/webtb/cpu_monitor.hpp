#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>

#include "webtb/monitor.hpp"

namespace webtb::monitors {

/// CPU percent of the browser's process tree (100 = one core). Channel "total" is the
/// whole tree; "thread_rank<k>" is the k-th busiest thread of the interval.
class CpuMonitor final : public Monitor {
 public:
  explicit CpuMonitor(int ranked_threads = 8);

  const std::string& id() const override { return id_; }
  const std::string& unit() const override { return unit_; }
  const std::vector<std::string>& channels() const override { return channels_; }

  void start(const MonitorContext& ctx) override;
  std::vector<Reading> sample() override;

  /// Most recent "total"; readable from any thread.
  double latest_total() const { return latest_total_.load(); }
  int cpu_capacity() const { return cpu_capacity_; }

 private:
  std::map<pid_t, std::uint64_t> snapshot() const;

  std::string id_ = "cpu";
  std::string unit_ = "percent";
  std::vector<std::string> channels_;
  int ranked_threads_;
  pid_t root_ = 0;
  int cpu_capacity_ = 1;
  std::map<pid_t, std::uint64_t> previous_;
  std::chrono::steady_clock::time_point previous_at_;
  std::atomic<double> latest_total_{0.0};
};

/// Resident and virtual memory of the browser's process tree, in MB.
class MemoryMonitor final : public Monitor {
 public:
  const std::string& id() const override { return id_; }
  const std::string& unit() const override { return unit_; }
  const std::vector<std::string>& channels() const override { return channels_; }

  void start(const MonitorContext& ctx) override { root_ = ctx.browser_pid; }
  std::vector<Reading> sample() override;

 private:
  std::string id_ = "memory";
  std::string unit_ = "MB";
  std::vector<std::string> channels_{"resident_mb", "virtual_mb"};
  pid_t root_ = 0;
};

}  // namespace webtb::monitors
