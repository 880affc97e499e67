#include "webtb/cpu_monitor.hpp"

#include <algorithm>

#include "webtb/proc.hpp"

namespace webtb::monitors {

CpuMonitor::CpuMonitor(int ranked_threads) : ranked_threads_(ranked_threads) {
  channels_.push_back("total");
  for (int k = 1; k <= ranked_threads_; ++k) channels_.push_back("thread_rank" + std::to_string(k));
}

std::map<pid_t, std::uint64_t> CpuMonitor::snapshot() const {
  std::map<pid_t, std::uint64_t> out;
  for (pid_t pid : proc::process_tree(root_)) {
    for (const auto& t : proc::task_times(pid)) out[t.tid] = t.ticks;
  }
  return out;
}

void CpuMonitor::start(const MonitorContext& ctx) {
  root_ = ctx.browser_pid;
  cpu_capacity_ = ctx.cpu_set.empty() ? proc::available_cpus() : static_cast<int>(ctx.cpu_set.size());
  previous_ = snapshot();
  previous_at_ = std::chrono::steady_clock::now();
  latest_total_ = 0.0;
}

std::vector<Reading> CpuMonitor::sample() {
  if (!proc::alive(root_)) throw MonitorTerminated("browser process " + std::to_string(root_) + " exited");
  auto now_ticks = snapshot();
  const auto now = std::chrono::steady_clock::now();
  const double dt = std::chrono::duration<double>(now - previous_at_).count();
  const double scale = dt > 0.0 ? 100.0 / (static_cast<double>(proc::ticks_per_second()) * dt) : 0.0;

  std::vector<double> per_thread;
  double total = 0.0;
  for (const auto& [tid, ticks] : now_ticks) {
    const auto it = previous_.find(tid);
    // Threads born inside the interval spent all of their ticks in it.
    const std::uint64_t before = it == previous_.end() ? 0 : it->second;
    const double pct = static_cast<double>(ticks >= before ? ticks - before : 0) * scale;
    per_thread.push_back(pct);
    total += pct;
  }
  std::sort(per_thread.begin(), per_thread.end(), std::greater<>());
  per_thread.resize(static_cast<std::size_t>(ranked_threads_), 0.0);

  previous_ = std::move(now_ticks);
  previous_at_ = now;
  latest_total_ = total;

  std::vector<Reading> out;
  out.push_back({"total", total});
  for (int k = 0; k < ranked_threads_; ++k) out.push_back({channels_[static_cast<std::size_t>(k) + 1], per_thread[static_cast<std::size_t>(k)]});
  return out;
}

std::vector<Reading> MemoryMonitor::sample() {
  if (!proc::alive(root_)) throw MonitorTerminated("browser process " + std::to_string(root_) + " exited");
  proc::MemoryUsage sum;
  for (pid_t pid : proc::process_tree(root_)) {
    if (auto m = proc::memory_usage(pid)) {
      sum.resident_mb += m->resident_mb;
      sum.virtual_mb += m->virtual_mb;
    }
  }
  return {{"resident_mb", sum.resident_mb}, {"virtual_mb", sum.virtual_mb}};
}

}  // namespace webtb::monitors
