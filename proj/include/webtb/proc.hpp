#pragma once

// Readers for the Linux /proc tree.

#include <sys/types.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace webtb::proc {

struct TaskTimes {
  pid_t tid = 0;
  std::string comm;
  std::uint64_t ticks = 0;  // utime + stime, in clock ticks
};

struct MemoryUsage {
  double resident_mb = 0.0;
  double virtual_mb = 0.0;
};

/// `root` followed by all live descendants; empty when `root` is gone.
std::vector<pid_t> process_tree(pid_t root);

/// Per-thread CPU times of one process; empty when it is gone.
std::vector<TaskTimes> task_times(pid_t pid);

std::optional<MemoryUsage> memory_usage(pid_t pid);

bool alive(pid_t pid);
long ticks_per_second();

/// CPUs this process may run on.
int available_cpus();

/// Parses "0-3,6" style lists. Throws std::invalid_argument on malformed text.
std::vector<int> parse_cpu_list(const std::string& text);

/// Pins the calling thread (tid 0) or a whole process to `cpus`; no-op when empty.
void set_affinity(pid_t pid, const std::vector<int>& cpus);

}  // namespace webtb::proc
