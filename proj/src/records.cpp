#include "webtb/records.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace webtb {

std::vector<double> SampleSeries::values(const std::string& channel) const {
  std::vector<double> out;
  for (const auto& s : samples) {
    if (s.channel == channel) out.push_back(s.value);
  }
  return out;
}

std::vector<double> SampleSeries::timestamps() const {
  std::vector<double> out;
  for (const auto& s : samples) {
    if (out.empty() || out.back() != s.t) out.push_back(s.t);
  }
  return out;
}

std::optional<double> SampleSeries::mean(const std::string& channel) const {
  const auto v = values(channel);
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> SampleSeries::mean_all() const {
  if (samples.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& s : samples) sum += s.value;
  return sum / static_cast<double>(samples.size());
}

std::string_view to_string(Rail r) {
  switch (r) {
    case Rail::rail_12v_a: return "rail_12v_a";
    case Rail::rail_12v_b: return "rail_12v_b";
    case Rail::rail_5v: return "rail_5v";
    case Rail::rail_3v3: return "rail_3v3";
  }
  return "?";
}

Rail parse_rail(std::string_view s) {
  for (auto r : kAllRails) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown rail: " + std::string(s));
}

const SampleSeries* ProbeResult::series(const std::string& monitor) const {
  const auto it = phase1.find(monitor);
  return it == phase1.end() ? nullptr : &it->second;
}

std::optional<InterferenceOutcome> ProbeResult::interference(int workers) const {
  for (const auto& o : phase2) {
    if (o.workers == workers) return o;
  }
  return std::nullopt;
}

std::string to_jsonl(const ProbeResult& r) {
  using nlohmann::json;
  std::string out;
  auto line = [&out](const json& j) { out += j.dump() + "\n"; };

  line({{"record", "probe"},
        {"target_url", r.target_url},
        {"ok", r.ok},
        {"error", r.error},
        {"attempts", r.attempts},
        {"phase1_start_unix_ms", r.phase1_start_unix_ms},
        {"phase1_duration_s", r.phase1_duration_s},
        {"phase1_end_s", r.phase1_end_s},
        {"network_gap", r.network_gap},
        {"browser", r.browser}});
  for (const auto& [id, s] : r.phase1) {
    line({{"record", "series"}, {"monitor", id}, {"unit", s.unit}, {"channels", s.channels},
          {"gap", s.gap}, {"note", s.note}});
    for (const auto& smp : s.samples) {
      line({{"record", "sample"}, {"monitor", id}, {"t", smp.t}, {"channel", smp.channel}, {"value", smp.value}});
    }
  }
  for (const auto& q : r.requests) {
    line({{"record", "request"}, {"t", q.t}, {"url", q.url}, {"initiator", q.initiator},
          {"transferred_bytes", q.transferred_bytes}, {"resource_type", q.resource_type},
          {"status_code", q.status_code}});
  }
  for (const auto& f : r.frames) {
    line({{"record", "ws_frame"}, {"t", f.t},
          {"direction", f.direction == WsFrameRecord::Direction::sent ? "sent" : "received"},
          {"payload_bytes", f.payload_bytes}, {"endpoint_url", f.endpoint_url}});
  }
  for (const auto& o : r.phase2) {
    line({{"record", "interference"}, {"workers", o.workers}, {"completed_ops", o.completed_ops},
          {"baseline_ops", o.baseline_ops}, {"duration_s", o.duration_s}, {"ratio", o.ratio()}});
  }
  line({{"record", "end"}});
  return out;
}

std::optional<ProbeResult> from_jsonl(const std::string& text) {
  using nlohmann::json;
  ProbeResult r;
  bool saw_header = false;
  bool saw_end = false;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (raw.empty()) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error&) {
      return std::nullopt;  // torn final line
    }
    const auto kind = j.at("record").get<std::string>();
    if (kind == "probe") {
      saw_header = true;
      r.target_url = j.at("target_url").get<std::string>();
      r.ok = j.at("ok").get<bool>();
      r.error = j.value("error", std::string{});
      r.attempts = j.value("attempts", 0);
      r.phase1_start_unix_ms = j.value("phase1_start_unix_ms", std::int64_t{0});
      r.phase1_duration_s = j.value("phase1_duration_s", 0.0);
      r.phase1_end_s = j.value("phase1_end_s", 0.0);
      r.network_gap = j.value("network_gap", false);
      r.browser = j.value("browser", json::object());
    } else if (kind == "series") {
      auto& s = r.phase1[j.at("monitor").get<std::string>()];
      s.monitor_id = j.at("monitor").get<std::string>();
      s.unit = j.value("unit", std::string{});
      s.channels = j.value("channels", std::vector<std::string>{});
      s.gap = j.value("gap", false);
      s.note = j.value("note", std::string{});
    } else if (kind == "sample") {
      r.phase1[j.at("monitor").get<std::string>()].samples.push_back(
          {j.at("t").get<double>(), j.at("channel").get<std::string>(), j.at("value").get<double>()});
    } else if (kind == "request") {
      r.requests.push_back({j.at("t").get<double>(), j.at("url").get<std::string>(),
                            j.value("initiator", std::string{}), j.at("transferred_bytes").get<std::int64_t>(),
                            j.value("resource_type", std::string{}), j.value("status_code", 0)});
    } else if (kind == "ws_frame") {
      r.frames.push_back({j.at("t").get<double>(),
                          j.at("direction").get<std::string>() == "sent" ? WsFrameRecord::Direction::sent
                                                                         : WsFrameRecord::Direction::received,
                          j.at("payload_bytes").get<std::int64_t>(), j.value("endpoint_url", std::string{})});
    } else if (kind == "interference") {
      r.phase2.push_back({j.at("workers").get<int>(), j.at("completed_ops").get<std::int64_t>(),
                          j.at("baseline_ops").get<std::int64_t>(), j.value("duration_s", 0.0)});
    } else if (kind == "end") {
      saw_end = true;
    }
  }
  if (!saw_header || !saw_end) return std::nullopt;
  return r;
}

}  // namespace webtb
