#pragma once

// Parallel-workload interference: a multi-threaded digest benchmark whose completed
// iterations under page load are compared with a baseline measured alone.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "webtb/records.hpp"

namespace webtb::monitors {

inline constexpr int kInterferenceWorkerCounts[] = {1, 2, 4};

/// Runs `workers` threads hashing for `duration_s` seconds and returns the total
/// completed digests. Threads are pinned to `cpu_set` when it is non-empty.
std::int64_t run_digest_benchmark(int workers, double duration_s, const std::vector<int>& cpu_set = {});

class InterferenceBenchmark {
 public:
  explicit InterferenceBenchmark(std::vector<int> cpu_set = {}) : cpu_set_(std::move(cpu_set)) {}

  /// Measures the benchmark alone for every worker count at this duration.
  void calibrate(const std::vector<int>& worker_counts, double duration_s);
  void set_baseline(int workers, double duration_s, std::int64_t ops);
  std::optional<std::int64_t> baseline(int workers, double duration_s) const;

  /// Throws webtb::CalibrationMissing when no baseline exists for (workers, duration).
  InterferenceOutcome run(int workers, double duration_s) const;

  const std::vector<int>& cpu_set() const { return cpu_set_; }

 private:
  std::vector<int> cpu_set_;
  mutable std::mutex mu_;
  std::map<std::pair<int, std::int64_t>, std::int64_t> baselines_;  // (workers, duration ms) -> ops
};

}  // namespace webtb::monitors
