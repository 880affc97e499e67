#pragma once

// Miner page role: hashing workers throttled in 100 ms slices plus a reporter that
// speaks the proof-of-work protocol over a WebSocket and mirrors every frame as a
// protocol event.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace mockbrowser {

struct MinerParams {
  std::string ws_url;
  int workers = 1;
  double throttle = 0.0;
  double interval_s = 1.0;
  std::int64_t frame_size = 0;
  std::int64_t hashes_per_share = 0;  // 0: share every interval with the hashes done since the last one
};

using EmitFn = std::function<void(const std::string& method, nlohmann::json params)>;

class MinerRuntime {
 public:
  MinerRuntime(MinerParams params, EmitFn emit, std::string request_id);
  ~MinerRuntime();
  MinerRuntime(const MinerRuntime&) = delete;
  MinerRuntime& operator=(const MinerRuntime&) = delete;

  void start();
  void stop();
  nlohmann::json stats() const;

 private:
  void work(int index);
  void report();
  bool session();
  /// Sleeps until `t` unless stopped; false when stopped.
  bool wait_until(std::chrono::steady_clock::time_point t);

  MinerParams params_;
  EmitFn emit_;
  std::string request_id_;
  std::chrono::steady_clock::time_point started_;

  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::condition_variable cv_;
  std::atomic<int> socket_fd_{-1};

  std::atomic<std::int64_t> hashes_{0};
  std::atomic<std::int64_t> hashes_reported_{0};
  std::atomic<std::int64_t> shares_sent_{0};
  std::atomic<std::int64_t> jobs_received_{0};
  std::atomic<std::int64_t> errors_received_{0};
  std::atomic<std::int64_t> reconnects_{0};

  std::vector<std::thread> workers_;
  std::thread reporter_;
};

}  // namespace mockbrowser
