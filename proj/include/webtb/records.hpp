#pragma once

// Measurement records shared by the monitors, the harness and the post-processing.
// Timestamps are seconds relative to the start of the probe's first phase.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace webtb {

struct Sample {
  double t = 0.0;
  std::string channel;
  double value = 0.0;
};

struct SampleSeries {
  std::string monitor_id;
  std::string unit;
  std::vector<std::string> channels;
  std::vector<Sample> samples;
  bool gap = false;  // samples were dropped (overflow) or the source went away
  std::string note;

  std::vector<double> values(const std::string& channel) const;
  /// Distinct sample timestamps in order.
  std::vector<double> timestamps() const;
  std::optional<double> mean(const std::string& channel) const;
  /// Mean over every sample of every channel.
  std::optional<double> mean_all() const;
};

struct RequestRecord {
  double t = 0.0;
  std::string url;
  std::string initiator;
  std::int64_t transferred_bytes = 0;
  std::string resource_type;
  int status_code = 0;
};

struct WsFrameRecord {
  enum class Direction { sent, received };
  double t = 0.0;
  Direction direction = Direction::sent;
  std::int64_t payload_bytes = 0;
  std::string endpoint_url;
};

enum class Rail { rail_12v_a, rail_12v_b, rail_5v, rail_3v3 };
std::string_view to_string(Rail r);
Rail parse_rail(std::string_view s);
inline constexpr Rail kAllRails[] = {Rail::rail_12v_a, Rail::rail_12v_b, Rail::rail_5v, Rail::rail_3v3};

struct PowerSample {
  double t = 0.0;
  Rail rail = Rail::rail_12v_a;
  double watts = 0.0;
};

struct InterferenceOutcome {
  int workers = 1;
  std::int64_t completed_ops = 0;
  std::int64_t baseline_ops = 0;
  double duration_s = 0.0;

  double ratio() const {
    return baseline_ops > 0 ? static_cast<double>(completed_ops) / static_cast<double>(baseline_ops) : 0.0;
  }
};

struct ProbeResult {
  std::string target_url;
  bool ok = false;
  std::string error;
  int attempts = 0;

  std::int64_t phase1_start_unix_ms = 0;
  double phase1_duration_s = 0.0;  // configured window
  double phase1_end_s = 0.0;       // measured end, relative to phase 1 start

  std::map<std::string, SampleSeries> phase1;
  std::vector<RequestRecord> requests;
  std::vector<WsFrameRecord> frames;
  bool network_gap = false;

  std::vector<InterferenceOutcome> phase2;
  nlohmann::json browser = nlohmann::json::object();

  const SampleSeries* series(const std::string& monitor) const;
  std::optional<InterferenceOutcome> interference(int workers) const;
};

/// One JSON object per line; the last line is an "end" record marking completeness.
std::string to_jsonl(const ProbeResult& r);
/// Returns nullopt for a truncated file (no "end" record).
std::optional<ProbeResult> from_jsonl(const std::string& text);

}  // namespace webtb
