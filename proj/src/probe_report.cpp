#include "webtb/probe_report.hpp"

#include <fmt/format.h>

#include <set>

namespace webtb::stats {

std::map<std::string, double> site_metrics(const ProbeResult& probe) {
  std::map<std::string, double> out;
  for (const auto& [id, series] : probe.phase1) {
    if (id == "network") continue;
    if (id == "temperature") {
      if (const auto m = series.mean_all()) out["temperature.mean"] = *m;
      continue;
    }
    for (const auto& ch : series.channels) {
      if (const auto m = series.mean(ch)) out[id + "." + ch] = *m;
    }
  }
  for (const auto& o : probe.phase2) {
    if (o.baseline_ops > 0) out[fmt::format("interference.w{}", o.workers)] = o.ratio();
  }
  return out;
}

namespace {

std::map<std::string, std::vector<double>> by_metric(const std::vector<ProbeResult>& probes) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& p : probes) {
    if (!p.ok) continue;
    for (const auto& [metric, v] : site_metrics(p)) values[metric].push_back(v);
  }
  return values;
}

}  // namespace

std::vector<PercentileTable> corpus_tables(const std::vector<ProbeResult>& probes, const std::string& prefix) {
  std::vector<PercentileTable> tables;
  for (const auto& [metric, values] : by_metric(probes)) tables.push_back(percentiles(values, kDefaultPoints, prefix + metric));
  return tables;
}

std::vector<ComparisonRow> compare_probe_corpora(const std::vector<ProbeResult>& a, const std::vector<ProbeResult>& b) {
  const auto va = by_metric(a);
  const auto vb = by_metric(b);
  std::vector<ComparisonRow> rows;
  for (const auto& [metric, values] : va) {
    const auto it = vb.find(metric);
    if (it != vb.end()) rows.push_back(compare_values(values, it->second, metric));
  }
  return rows;
}

}  // namespace webtb::stats
