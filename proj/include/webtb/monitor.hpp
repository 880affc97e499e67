#pragma once

// Pluggable measurement components. Each monitor produces (channel, value)
// readings on demand; the harness decides when to call sample().

#include <sys/types.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace webtb::monitors {

struct Reading {
  std::string channel;
  double value = 0.0;
};

/// What a monitor is attached to during a probe.
struct MonitorContext {
  pid_t browser_pid = 0;
  std::vector<int> cpu_set;  // empty: all CPUs
};

/// The measured process disappeared; the probe cannot continue.
class MonitorTerminated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Monitor {
 public:
  virtual ~Monitor() = default;

  virtual const std::string& id() const = 0;
  virtual const std::string& unit() const = 0;
  /// Fixed once the monitor is constructed.
  virtual const std::vector<std::string>& channels() const = 0;

  /// Establishes baselines; called once before the first sample of a phase.
  virtual void start(const MonitorContext&) {}
  virtual std::vector<Reading> sample() = 0;
  virtual void stop() {}
};

}  // namespace webtb::monitors
