#pragma once

// Publisher revenue under in-browser mining versus display advertising.
//
// All money is USD in double precision. Every function validates its inputs
// and throws std::domain_error on negative or non-finite values.

#include <cstdint>
#include <optional>
#include <variant>

namespace webtb::profit {

struct MiningRateModel {
  double payout_per_mhash = 0.0;  // coin units per 10^6 accepted hashes
  double coin_price = 0.0;        // USD per coin unit
};

struct AdRateModel {
  double ad_slots = 3.0;  // impressions per visit; fractional averages allowed
  double cpm = 1.0;       // USD per 1000 impressions
};

struct VisitorProfile {
  double hash_rate = 0.0;                // H/s
  std::optional<double> dataplan_price;  // USD per byte
};

struct TrafficModel {
  double visitors_per_month = 0.0;
  double visit_duration_s = 60.0;
};

/// Reference constants used in the monetization comparison.
namespace reference {
inline constexpr double kPayoutPerMHash = 0.0001468;
inline constexpr double kCoinPriceUsd = 205.0;
inline constexpr double kCpm = 1.0;
inline constexpr double kAdSlots = 3.0;
inline constexpr double kMeasuredAdSlots = 3.4;
inline constexpr double kVisitorsPerMonth = 100000.0;
inline constexpr double kVisitDurationS = 60.0;
inline constexpr double kHashRateTiers[] = {50.0, 100.0, 200.0, 300.0};
// Cellular price implied by 0.000219 USD per minute at 146 B/s.
inline constexpr double kCellularPricePerByte = 0.000219 / (146.0 * 60.0);
}  // namespace reference

double mining_revenue(const VisitorProfile& visitor, double duration_s,
                      const MiningRateModel& rates);

double ad_revenue(const AdRateModel& rates, double visits);

/// Visit length at which mining matches the ad revenue of one visit.
/// Returns +infinity when the mining side earns nothing per second.
double break_even_duration(const AdRateModel& ad, const VisitorProfile& visitor,
                           const MiningRateModel& mining);

struct MiningStrategy {
  VisitorProfile visitor;
  MiningRateModel rates;
};
struct AdStrategy {
  AdRateModel rates;
};
using Strategy = std::variant<MiningStrategy, AdStrategy>;

double monthly_profit(const TrafficModel& traffic, const Strategy& strategy);

/// Per-tab hash rate when `concurrent_mining_tabs` miners share one device.
double contention_scaled_rate(double device_rate, std::int64_t concurrent_mining_tabs);

double cellular_cost(double mean_rate_bytes_per_s, double duration_s, double price_per_byte);

}  // namespace webtb::profit
