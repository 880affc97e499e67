#include "webtb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace webtb::stats {

double PercentileTable::at(double p) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] == p) return values[i];
  }
  throw std::out_of_range("percentile not tabulated: " + std::to_string(p));
}

PercentileTable percentiles(std::span<const double> series, const std::vector<double>& points,
                            std::string metric) {
  if (series.empty()) throw std::invalid_argument("percentiles of an empty series");
  for (double p : points) {
    if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile point out of range");
  }
  // Selection instead of a full sort; points are visited in ascending order so each
  // nth_element only partitions the not-yet-ordered tail.
  std::vector<double> work(series.begin(), series.end());
  const auto n = work.size();

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] < points[b]; });

  PercentileTable table{std::move(metric), points, std::vector<double>(points.size())};
  std::size_t ordered_upto = 0;  // work[0, ordered_upto) holds the smallest values in order
  auto value_at = [&](std::size_t k) {
    if (k >= ordered_upto) {
      std::nth_element(work.begin() + static_cast<std::ptrdiff_t>(ordered_upto),
                       work.begin() + static_cast<std::ptrdiff_t>(k), work.end());
      std::sort(work.begin() + static_cast<std::ptrdiff_t>(ordered_upto),
                work.begin() + static_cast<std::ptrdiff_t>(k));
      ordered_upto = k + 1;
    }
    return work[k];
  };

  for (auto idx : order) {
    const double rank = points[idx] / 100.0 * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = rank - static_cast<double>(lo);
    const double vlo = value_at(lo);
    const double vhi = frac > 0.0 ? value_at(hi) : vlo;
    table.values[idx] = vlo + frac * (vhi - vlo);
  }
  return table;
}

double median(std::span<const double> series) { return percentiles(series, {50.0}).values.front(); }

double mean(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("mean of an empty series");
  return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

ComparisonRow compare_values(std::span<const double> a, std::span<const double> b, std::string metric) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare_corpora needs two non-empty corpora");
  ComparisonRow row{std::move(metric), median(a), median(b), std::nullopt};
  if (row.group_a > 0.0) row.ratio = row.group_b / row.group_a;
  return row;
}

}  // namespace webtb::stats
