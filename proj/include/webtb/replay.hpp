#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "webtb/monitor.hpp"

namespace webtb::monitors {

/// A recorded telemetry trace in CSV form: `timestamp,channel,value`, one row per
/// reading, an optional header row. Rows sharing a timestamp form one tick.
class ReplayTrace {
 public:
  /// Throws webtb::ParseError with the offending line.
  static ReplayTrace parse(std::string_view csv);
  static ReplayTrace load(const std::string& path);

  /// Readings of the next tick; empty once the trace is exhausted.
  std::vector<Reading> next();

  /// Channel names in first-appearance order.
  const std::vector<std::string>& channels() const { return channels_; }
  std::size_t tick_count() const { return ticks_.size(); }

 private:
  std::vector<std::vector<Reading>> ticks_;
  std::vector<std::string> channels_;
  std::size_t cursor_ = 0;
};

}  // namespace webtb::monitors
