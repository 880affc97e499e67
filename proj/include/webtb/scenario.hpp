#pragma once

// Revenue scenario file and the tables the `simulate` command prints.
//
// Keys (all optional, defaults are the reference constants):
//   payout_per_mhash, coin_price, cpm, ad_slots, hash_rates[], visitors_per_month,
//   visit_duration_s, tabs, price_per_byte, miner_traffic_bytes_per_s

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "webtb/profit_model.hpp"

namespace webtb::profit {

struct Scenario {
  MiningRateModel mining{reference::kPayoutPerMHash, reference::kCoinPriceUsd};
  AdRateModel ads{reference::kAdSlots, reference::kCpm};
  std::vector<double> hash_rates{std::begin(reference::kHashRateTiers), std::end(reference::kHashRateTiers)};
  TrafficModel traffic{reference::kVisitorsPerMonth, reference::kVisitDurationS};
  std::int64_t tabs = 1;
  double price_per_byte = reference::kCellularPricePerByte;
  double miner_traffic_bytes_per_s = 146.0;

  /// Throws std::invalid_argument on unknown keys or wrongly typed values.
  static Scenario from_json(const nlohmann::json& j);
};

struct ScenarioRow {
  double hash_rate = 0.0;       // device rate as configured
  double effective_rate = 0.0;  // per tab after contention
  double monthly_mining = 0.0;
  double monthly_ads = 0.0;
  double ads_to_mining = 0.0;   // +inf when mining earns nothing
  double break_even_s = 0.0;
  double cellular_cost_per_visit = 0.0;
};

std::vector<ScenarioRow> evaluate(const Scenario& s);

/// strategy,parameter,revenue_usd
std::string render_revenue_csv(const Scenario& s);
/// hash_rate,effective_rate,break_even_s,break_even_min,ads_to_mining_ratio,cellular_cost_usd
std::string render_break_even_csv(const Scenario& s);

}  // namespace webtb::profit
