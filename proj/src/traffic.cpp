#include "webtb/traffic.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "webtb/detector.hpp"
#include "webtb/report.hpp"

namespace webtb::traffic {
namespace {

bool matches_any(const std::vector<detect::SignatureEntry>& entries, const std::string& url) {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const auto& e) { return detect::entry_matches_url(e, url); });
}

}  // namespace

TrafficSummary summarize(std::span<const RequestRecord> requests, std::span<const WsFrameRecord> frames,
                         const detect::Blacklist& bl, double window_s, std::string target_url) {
  if (!(window_s > 0.0)) throw std::invalid_argument("traffic window must be positive");
  const auto miner = bl.of_category(detect::Category::miner);
  const auto ads = bl.of_category(detect::Category::ad);

  TrafficSummary s;
  s.target_url = std::move(target_url);
  s.window_s = window_s;
  for (const auto& f : frames) {
    if (matches_any(miner, f.endpoint_url)) {
      s.miner_bytes += f.payload_bytes;
      ++s.miner_frame_count;
    } else {
      s.other_bytes += f.payload_bytes;
    }
  }
  for (const auto& r : requests) {
    if (matches_any(ads, r.url)) {
      s.ad_bytes += r.transferred_bytes;
    } else {
      s.other_bytes += r.transferred_bytes;
    }
  }
  s.mean_frame_size = static_cast<double>(s.miner_bytes) /
                      static_cast<double>(std::max<std::int64_t>(1, s.miner_frame_count));
  s.miner_bitrate = static_cast<double>(s.miner_bytes) * 8.0 / window_s;
  return s;
}

TrafficSummary summarize(const ProbeResult& probe, const detect::Blacklist& bl) {
  return summarize(probe.requests, probe.frames, bl, probe.phase1_duration_s, probe.target_url);
}

stats::PercentileTable bitrate_distribution(std::span<const TrafficSummary> summaries,
                                            const std::vector<double>& points) {
  if (summaries.empty()) throw std::invalid_argument("bitrate distribution of no sites");
  std::vector<double> rates;
  rates.reserve(summaries.size());
  for (const auto& s : summaries) rates.push_back(s.miner_bitrate);
  return stats::percentiles(rates, points, "miner_bitrate_bps");
}

std::string render_summaries_csv(std::span<const TrafficSummary> summaries) {
  std::string out =
      "target_url,window_s,miner_bytes,ad_bytes,other_bytes,miner_frame_count,mean_frame_size,miner_bitrate_bps\n";
  for (const auto& s : summaries) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", s.target_url, stats::format_sig4(s.window_s), s.miner_bytes,
                       s.ad_bytes, s.other_bytes, s.miner_frame_count, stats::format_sig4(s.mean_frame_size),
                       stats::format_sig4(s.miner_bitrate));
  }
  return out;
}

}  // namespace webtb::traffic
