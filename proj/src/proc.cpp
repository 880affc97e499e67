#include "webtb/proc.hpp"

#include <sched.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace webtb::proc {
namespace {

namespace fs = std::filesystem;

struct StatLine {
  std::string comm;
  pid_t ppid = 0;
  std::uint64_t utime = 0;
  std::uint64_t stime = 0;
};

std::optional<StatLine> read_stat(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return std::nullopt;
  const auto open = line.find('(');
  const auto close = line.rfind(')');
  if (open == std::string::npos || close == std::string::npos) return std::nullopt;
  StatLine s;
  s.comm = line.substr(open + 1, close - open - 1);
  std::istringstream rest(line.substr(close + 2));
  std::vector<std::string> fields;
  std::string f;
  while (rest >> f) fields.push_back(f);
  // fields[0] is the state (field 3 of stat); utime/stime are fields 14/15.
  if (fields.size() < 13) return std::nullopt;
  s.ppid = static_cast<pid_t>(std::stol(fields[1]));
  s.utime = std::stoull(fields[11]);
  s.stime = std::stoull(fields[12]);
  return s;
}

bool is_number(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

}  // namespace

std::vector<pid_t> process_tree(pid_t root) {
  if (!alive(root)) return {};
  std::multimap<pid_t, pid_t> children;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator("/proc", ec)) {
    const auto name = e.path().filename().string();
    if (!is_number(name)) continue;
    if (auto st = read_stat(e.path() / "stat")) children.emplace(st->ppid, static_cast<pid_t>(std::stol(name)));
  }
  std::vector<pid_t> out{root};
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [lo, hi] = children.equal_range(out[i]);
    for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  }
  return out;
}

std::vector<TaskTimes> task_times(pid_t pid) {
  std::vector<TaskTimes> out;
  std::error_code ec;
  const fs::path task_dir = fs::path("/proc") / std::to_string(pid) / "task";
  for (const auto& e : fs::directory_iterator(task_dir, ec)) {
    const auto name = e.path().filename().string();
    if (!is_number(name)) continue;
    if (auto st = read_stat(e.path() / "stat")) {
      out.push_back({static_cast<pid_t>(std::stol(name)), st->comm, st->utime + st->stime});
    }
  }
  return out;
}

std::optional<MemoryUsage> memory_usage(pid_t pid) {
  std::ifstream in(fs::path("/proc") / std::to_string(pid) / "status");
  if (!in) return std::nullopt;
  MemoryUsage m;
  bool any = false;
  std::string key;
  while (in >> key) {
    if (key == "VmRSS:" || key == "VmSize:") {
      double kb = 0.0;
      in >> kb;
      (key == "VmRSS:" ? m.resident_mb : m.virtual_mb) = kb / 1024.0;
      any = true;
    }
    std::string rest;
    std::getline(in, rest);
  }
  // Kernel threads and zombies have no Vm* lines; they contribute nothing.
  if (!any) return MemoryUsage{};
  return m;
}

bool alive(pid_t pid) {
  if (pid <= 0) return false;
  if (::kill(pid, 0) != 0 && errno == ESRCH) return false;
  std::ifstream in(fs::path("/proc") / std::to_string(pid) / "stat");
  std::string line;
  if (!std::getline(in, line)) return false;
  const auto close = line.rfind(')');
  return close != std::string::npos && close + 2 < line.size() && line[close + 2] != 'Z';
}

long ticks_per_second() {
  static const long ticks = ::sysconf(_SC_CLK_TCK);
  return ticks;
}

int available_cpus() {
  cpu_set_t set;
  CPU_ZERO(&set);
  if (::sched_getaffinity(0, sizeof(set), &set) != 0) return 1;
  return CPU_COUNT(&set);
}

std::vector<int> parse_cpu_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, dash));
        const int hi = std::stoi(part.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument("descending range");
        for (int c = lo; c <= hi; ++c) out.push_back(c);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed cpu list: " + text);
    }
  }
  return out;
}

void set_affinity(pid_t pid, const std::vector<int>& cpus) {
  if (cpus.empty()) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  for (int c : cpus) CPU_SET(c, &set);
  if (::sched_setaffinity(pid, sizeof(set), &set) != 0) {
    throw std::system_error(errno, std::generic_category(), "sched_setaffinity");
  }
}

}  // namespace webtb::proc
