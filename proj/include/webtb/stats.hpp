#pragma once

// Percentile summaries and cross-corpus comparisons.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace webtb::stats {

inline const std::vector<double> kDefaultPoints = {10.0, 25.0, 50.0, 75.0, 90.0};

struct PercentileTable {
  std::string metric;
  std::vector<double> points;  // percent, each in (0, 100)
  std::vector<double> values;  // same length as points

  /// Value at percentile `p`; throws std::out_of_range when not tabulated.
  double at(double p) const;
  double median() const { return at(50.0); }
};

/// Linear interpolation between order statistics: rank = p/100 * (n-1), zero-indexed.
/// Throws std::invalid_argument on an empty series or a point outside [0, 100].
PercentileTable percentiles(std::span<const double> series,
                            const std::vector<double>& points = kDefaultPoints,
                            std::string metric = {});

double median(std::span<const double> series);
double mean(std::span<const double> series);

struct ComparisonRow {
  std::string metric;
  double group_a = 0.0;
  double group_b = 0.0;
  std::optional<double> ratio;  // b / a; empty when a's median is zero

  bool ratio_defined() const { return ratio.has_value(); }
};

/// Ratio of medians of per-item values. Items for which the extractor yields
/// nothing are skipped; each group must keep at least one value.
template <typename Item>
ComparisonRow compare_corpora(const std::vector<Item>& a, const std::vector<Item>& b,
                              const std::function<std::optional<double>(const Item&)>& extractor,
                              std::string metric);

ComparisonRow compare_values(std::span<const double> a, std::span<const double> b, std::string metric);

template <typename Item>
ComparisonRow compare_corpora(const std::vector<Item>& a, const std::vector<Item>& b,
                              const std::function<std::optional<double>(const Item&)>& extractor,
                              std::string metric) {
  auto collect = [&](const std::vector<Item>& items) {
    std::vector<double> out;
    for (const auto& it : items) {
      if (auto v = extractor(it)) out.push_back(*v);
    }
    return out;
  };
  const auto va = collect(a);
  const auto vb = collect(b);
  return compare_values(va, vb, std::move(metric));
}

}  // namespace webtb::stats
