#include "webtb/profit_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace webtb::profit {
namespace {

void require_non_negative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::domain_error(std::string(name) + " must be finite and non-negative");
  }
}

void validate(const MiningRateModel& m) {
  require_non_negative(m.payout_per_mhash, "payout_per_mhash");
  require_non_negative(m.coin_price, "coin_price");
}

void validate(const AdRateModel& a) {
  require_non_negative(a.ad_slots, "ad_slots");
  require_non_negative(a.cpm, "cpm");
}

void validate(const VisitorProfile& v) {
  require_non_negative(v.hash_rate, "hash_rate");
  if (v.dataplan_price) require_non_negative(*v.dataplan_price, "dataplan_price");
}

double usd_per_second(const VisitorProfile& visitor, const MiningRateModel& rates) {
  return visitor.hash_rate / 1e6 * rates.payout_per_mhash * rates.coin_price;
}

}  // namespace

double mining_revenue(const VisitorProfile& visitor, double duration_s,
                      const MiningRateModel& rates) {
  validate(visitor);
  validate(rates);
  require_non_negative(duration_s, "duration");
  // Multiply in the order rate * time first so doubling either doubles the result exactly.
  return visitor.hash_rate * duration_s / 1e6 * rates.payout_per_mhash * rates.coin_price;
}

double ad_revenue(const AdRateModel& rates, double visits) {
  validate(rates);
  require_non_negative(visits, "visits");
  return rates.ad_slots * rates.cpm / 1000.0 * visits;
}

double break_even_duration(const AdRateModel& ad, const VisitorProfile& visitor,
                           const MiningRateModel& mining) {
  validate(ad);
  validate(visitor);
  validate(mining);
  const double target = ad_revenue(ad, 1.0);
  if (target == 0.0) return 0.0;
  const double per_second = usd_per_second(visitor, mining);
  if (per_second == 0.0) return std::numeric_limits<double>::infinity();
  return target / per_second;
}

double monthly_profit(const TrafficModel& traffic, const Strategy& strategy) {
  require_non_negative(traffic.visitors_per_month, "visitors_per_month");
  require_non_negative(traffic.visit_duration_s, "visit_duration");
  struct Visitor {
    const TrafficModel& t;
    double operator()(const MiningStrategy& s) const {
      return t.visitors_per_month * mining_revenue(s.visitor, t.visit_duration_s, s.rates);
    }
    double operator()(const AdStrategy& s) const { return ad_revenue(s.rates, t.visitors_per_month); }
  };
  return std::visit(Visitor{traffic}, strategy);
}

double contention_scaled_rate(double device_rate, std::int64_t concurrent_mining_tabs) {
  require_non_negative(device_rate, "device_rate");
  if (concurrent_mining_tabs < 1) {
    throw std::domain_error("concurrent_mining_tabs must be at least 1");
  }
  return device_rate / static_cast<double>(concurrent_mining_tabs);
}

double cellular_cost(double mean_rate_bytes_per_s, double duration_s, double price_per_byte) {
  require_non_negative(mean_rate_bytes_per_s, "mean_rate");
  require_non_negative(duration_s, "duration");
  require_non_negative(price_per_byte, "price_per_byte");
  return mean_rate_bytes_per_s * duration_s * price_per_byte;
}

}  // namespace webtb::profit
