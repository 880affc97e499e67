#pragma once

// Splits a probe's traffic into miner-channel, ad-related and other bytes.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "webtb/records.hpp"
#include "webtb/signature.hpp"
#include "webtb/stats.hpp"

namespace webtb::traffic {

struct TrafficSummary {
  std::string target_url;
  double window_s = 0.0;
  std::int64_t miner_bytes = 0;
  std::int64_t ad_bytes = 0;
  std::int64_t other_bytes = 0;
  std::int64_t miner_frame_count = 0;
  double mean_frame_size = 0.0;  // miner_bytes / max(1, miner_frame_count)
  double miner_bitrate = 0.0;    // bit/s over the window

  std::int64_t total_bytes() const { return miner_bytes + ad_bytes + other_bytes; }
};

/// WebSocket frames to miner-listed endpoints count as miner bytes; requests to
/// ad-listed URLs count as ad bytes; everything else is other. Nothing is dropped.
/// Throws std::invalid_argument for a non-positive window.
TrafficSummary summarize(std::span<const RequestRecord> requests, std::span<const WsFrameRecord> frames,
                         const detect::Blacklist& bl, double window_s, std::string target_url = {});

/// Convenience over a stored probe; the window is the probe's phase-1 duration.
TrafficSummary summarize(const ProbeResult& probe, const detect::Blacklist& bl);

/// Percentiles of miner_bitrate across sites. Throws std::invalid_argument when empty.
stats::PercentileTable bitrate_distribution(std::span<const TrafficSummary> summaries,
                                            const std::vector<double>& points = stats::kDefaultPoints);

std::string render_summaries_csv(std::span<const TrafficSummary> summaries);

}  // namespace webtb::traffic
