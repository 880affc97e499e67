#pragma once

// Per-site aggregation of stored probes: the mean of each channel over phase 1, then
// percentiles and medians across sites.

#include <map>
#include <string>
#include <vector>

#include "webtb/records.hpp"
#include "webtb/stats.hpp"

namespace webtb::stats {

/// Metric name -> per-site value. Names are "<monitor>.<channel>" for sampled
/// channels, "temperature.mean" over all cores, and "interference.w<N>" ratios.
/// Cumulative network counters are left to the traffic analyzer.
std::map<std::string, double> site_metrics(const ProbeResult& probe);

/// One table per metric over successful probes; `prefix` is prepended to metric names.
std::vector<PercentileTable> corpus_tables(const std::vector<ProbeResult>& probes, const std::string& prefix = {});

/// One row per metric present in both corpora, in metric-name order.
std::vector<ComparisonRow> compare_probe_corpora(const std::vector<ProbeResult>& a, const std::vector<ProbeResult>& b);

}  // namespace webtb::stats
