#include "webtb/interference.hpp"

#include <pthread.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "webtb/digest.hpp"
#include "webtb/error.hpp"

namespace webtb::monitors {
namespace {

std::int64_t duration_key(double duration_s) { return std::llround(duration_s * 1000.0); }

void pin_current_thread(const std::vector<int>& cpus) {
  if (cpus.empty()) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  for (int c : cpus) CPU_SET(c, &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
}

}  // namespace

std::int64_t run_digest_benchmark(int workers, double duration_s, const std::vector<int>& cpu_set) {
  if (workers < 1) throw std::invalid_argument("benchmark needs at least one worker");
  if (!(duration_s > 0.0)) throw std::invalid_argument("benchmark duration must be positive");

  using clock = std::chrono::steady_clock;
  std::atomic<int> ready{0};
  std::atomic<bool> go{false};
  std::atomic<std::int64_t> total{0};
  clock::time_point deadline;

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      pin_current_thread(cpu_set);
      DigestSpinner spinner(static_cast<std::uint64_t>(w) + 1);
      ready.fetch_add(1);
      while (!go.load(std::memory_order_acquire)) std::this_thread::yield();
      std::int64_t done = 0;
      constexpr std::uint64_t kBatch = 64;
      while (clock::now() < deadline) {
        spinner.spin(kBatch);
        done += kBatch;
      }
      total.fetch_add(done);
    });
  }
  while (ready.load() < workers) std::this_thread::yield();
  deadline = clock::now() + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(duration_s));
  go.store(true, std::memory_order_release);
  for (auto& t : threads) t.join();
  return total.load();
}

void InterferenceBenchmark::calibrate(const std::vector<int>& worker_counts, double duration_s) {
  // Median of three after a short warm-up: a cold or preempted single run reads low and
  // would inflate every later ratio.
  for (int w : worker_counts) {
    run_digest_benchmark(w, std::min(duration_s, 0.25), cpu_set_);
    std::array<std::int64_t, 3> runs{};
    for (auto& r : runs) r = run_digest_benchmark(w, duration_s, cpu_set_);
    std::sort(runs.begin(), runs.end());
    set_baseline(w, duration_s, runs[1]);
  }
}

void InterferenceBenchmark::set_baseline(int workers, double duration_s, std::int64_t ops) {
  std::lock_guard lock(mu_);
  baselines_[{workers, duration_key(duration_s)}] = ops;
}

std::optional<std::int64_t> InterferenceBenchmark::baseline(int workers, double duration_s) const {
  std::lock_guard lock(mu_);
  const auto it = baselines_.find({workers, duration_key(duration_s)});
  if (it == baselines_.end()) return std::nullopt;
  return it->second;
}

InterferenceOutcome InterferenceBenchmark::run(int workers, double duration_s) const {
  const auto base = baseline(workers, duration_s);
  if (!base) {
    throw CalibrationMissing("no interference baseline for " + std::to_string(workers) + " worker(s) over " +
                             std::to_string(duration_s) + " s; run calibration first");
  }
  InterferenceOutcome out;
  out.workers = workers;
  out.duration_s = duration_s;
  out.baseline_ops = *base;
  out.completed_ops = run_digest_benchmark(workers, duration_s, cpu_set_);
  return out;
}

}  // namespace webtb::monitors
