#pragma once

// Application-layer traffic capture from the browser's network event stream.

#include <chrono>
#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

#include "webtb/monitor.hpp"
#include "webtb/records.hpp"

namespace webtb::monitors {

/// Consumes remote-debugging Network.* events. Completed requests and every
/// WebSocket frame become records; as a Monitor it reports cumulative byte counters.
class NetworkRecorder final : public Monitor {
 public:
  explicit NetworkRecorder(std::size_t max_records = 1'000'000);

  const std::string& id() const override { return id_; }
  const std::string& unit() const override { return unit_; }
  const std::vector<std::string>& channels() const override { return channels_; }
  std::vector<Reading> sample() override;

  /// Starts a capture window; timestamps become relative to `origin`.
  void begin(std::chrono::steady_clock::time_point origin);
  /// Closes the window; events after this are ignored. Requests still in flight
  /// are recorded with the bytes seen so far.
  void end();

  /// Thread-safe; called from the driver's event thread.
  void on_event(const std::string& method, const nlohmann::json& params);

  std::vector<RequestRecord> requests() const;
  std::vector<WsFrameRecord> frames() const;
  bool gap() const;

 private:
  struct Pending {
    RequestRecord record;
    std::int64_t data_bytes = 0;
  };
  double relative_time(const nlohmann::json& params) const;
  void finish(const std::string& request_id, std::int64_t bytes, bool use_bytes);
  bool room() const { return requests_.size() + frames_.size() < max_records_; }

  std::string id_ = "network";
  std::string unit_ = "bytes";
  std::vector<std::string> channels_{"request_bytes", "ws_bytes"};

  mutable std::mutex mu_;
  bool open_ = false;
  std::chrono::steady_clock::time_point origin_;
  double origin_monotonic_s_ = 0.0;
  std::size_t max_records_;
  bool gap_ = false;
  std::map<std::string, Pending> pending_;
  std::map<std::string, std::string> sockets_;  // requestId -> url
  std::vector<RequestRecord> requests_;
  std::vector<WsFrameRecord> frames_;
  std::int64_t request_bytes_ = 0;
  std::int64_t ws_bytes_ = 0;
};

/// Seconds on the monotonic clock the browser uses for event timestamps.
double monotonic_seconds(std::chrono::steady_clock::time_point tp = std::chrono::steady_clock::now());

/// Payload size of a WebSocket frame event: text length, or decoded length for
/// base64 binary frames (opcode 2).
std::int64_t frame_payload_bytes(const nlohmann::json& response);

}  // namespace webtb::monitors
