#include "webtb/replay.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "webtb/error.hpp"
#include "webtb/url.hpp"

namespace webtb::monitors {

ReplayTrace ReplayTrace::parse(std::string_view csv) {
  ReplayTrace trace;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  bool have_ts = false;
  double current_ts = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss{std::string(t)};
    std::string col;
    while (std::getline(ss, col, ',')) cols.emplace_back(trim(col));
    if (cols.size() != 3) throw ParseError(line_no, "expected timestamp,channel,value");
    if (line_no == 1 && cols[0] == "timestamp") continue;
    double ts = 0.0, value = 0.0;
    try {
      std::size_t used = 0;
      ts = std::stod(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("trailing");
      value = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(line_no, "non-numeric timestamp or value");
    }
    if (cols[1].empty()) throw ParseError(line_no, "empty channel");
    if (have_ts && ts < current_ts) throw ParseError(line_no, "timestamps must not decrease");
    if (!have_ts || ts != current_ts) {
      trace.ticks_.emplace_back();
      current_ts = ts;
      have_ts = true;
    }
    trace.ticks_.back().push_back({cols[1], value});
    if (std::find(trace.channels_.begin(), trace.channels_.end(), cols[1]) == trace.channels_.end()) {
      trace.channels_.push_back(cols[1]);
    }
  }
  return trace;
}

ReplayTrace ReplayTrace::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

std::vector<Reading> ReplayTrace::next() {
  if (cursor_ >= ticks_.size()) return {};
  return ticks_[cursor_++];
}

}  // namespace webtb::monitors
