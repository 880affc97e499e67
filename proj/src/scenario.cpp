#include "webtb/scenario.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "webtb/report.hpp"

namespace webtb::profit {
namespace {

double number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw std::invalid_argument(std::string("scenario key '") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

Scenario Scenario::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"payout_per_mhash", "coin_price",       "cpm",
                                           "ad_slots",         "hash_rates",       "visitors_per_month",
                                           "visit_duration_s", "tabs",             "price_per_byte",
                                           "miner_traffic_bytes_per_s"};
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!known.contains(k)) throw std::invalid_argument("unknown scenario key '" + k + "'");
  }
  Scenario s;
  s.mining.payout_per_mhash = number(j, "payout_per_mhash", s.mining.payout_per_mhash);
  s.mining.coin_price = number(j, "coin_price", s.mining.coin_price);
  s.ads.cpm = number(j, "cpm", s.ads.cpm);
  s.ads.ad_slots = number(j, "ad_slots", s.ads.ad_slots);
  s.traffic.visitors_per_month = number(j, "visitors_per_month", s.traffic.visitors_per_month);
  s.traffic.visit_duration_s = number(j, "visit_duration_s", s.traffic.visit_duration_s);
  s.price_per_byte = number(j, "price_per_byte", s.price_per_byte);
  s.miner_traffic_bytes_per_s = number(j, "miner_traffic_bytes_per_s", s.miner_traffic_bytes_per_s);
  if (j.contains("tabs")) {
    if (!j["tabs"].is_number_integer()) throw std::invalid_argument("scenario key 'tabs' must be an integer");
    s.tabs = j["tabs"].get<std::int64_t>();
  }
  if (j.contains("hash_rates")) {
    if (!j["hash_rates"].is_array()) throw std::invalid_argument("scenario key 'hash_rates' must be an array");
    s.hash_rates.clear();
    for (const auto& r : j["hash_rates"]) {
      if (!r.is_number()) throw std::invalid_argument("hash_rates entries must be numbers");
      s.hash_rates.push_back(r.get<double>());
    }
  }
  return s;
}

std::vector<ScenarioRow> evaluate(const Scenario& s) {
  std::vector<ScenarioRow> rows;
  const double monthly_ads = monthly_profit(s.traffic, AdStrategy{s.ads});
  const double visit_cost = cellular_cost(s.miner_traffic_bytes_per_s, s.traffic.visit_duration_s, s.price_per_byte);
  for (double rate : s.hash_rates) {
    ScenarioRow row;
    row.hash_rate = rate;
    row.effective_rate = contention_scaled_rate(rate, s.tabs);
    const VisitorProfile visitor{row.effective_rate, s.price_per_byte};
    row.monthly_mining = monthly_profit(s.traffic, MiningStrategy{visitor, s.mining});
    row.monthly_ads = monthly_ads;
    row.ads_to_mining =
        row.monthly_mining > 0.0 ? monthly_ads / row.monthly_mining : std::numeric_limits<double>::infinity();
    row.break_even_s = break_even_duration(s.ads, visitor, s.mining);
    row.cellular_cost_per_visit = visit_cost;
    rows.push_back(row);
  }
  return rows;
}

std::string render_revenue_csv(const Scenario& s) {
  using stats::format_sig4;
  std::string out = "strategy,parameter,revenue_usd\n";
  const auto rows = evaluate(s);
  out += fmt::format("ads,ad_slots={}/cpm={},{}\n", format_sig4(s.ads.ad_slots), format_sig4(s.ads.cpm),
                     format_sig4(monthly_profit(s.traffic, AdStrategy{s.ads})));
  for (const auto& r : rows) {
    out += fmt::format("mining,hash_rate={}/tabs={},{}\n", format_sig4(r.hash_rate), s.tabs,
                       format_sig4(r.monthly_mining));
  }
  out += fmt::format("cellular_cost,bytes_per_s={}/visit_s={},{}\n", format_sig4(s.miner_traffic_bytes_per_s),
                     format_sig4(s.traffic.visit_duration_s),
                     format_sig4(cellular_cost(s.miner_traffic_bytes_per_s, s.traffic.visit_duration_s,
                                               s.price_per_byte) *
                                 s.traffic.visitors_per_month));
  return out;
}

std::string render_break_even_csv(const Scenario& s) {
  using stats::format_sig4;
  std::string out = "hash_rate,effective_rate,break_even_s,break_even_min,ads_to_mining_ratio,cellular_cost_usd\n";
  for (const auto& r : evaluate(s)) {
    const double cost_at_break_even =
        std::isfinite(r.break_even_s) ? cellular_cost(s.miner_traffic_bytes_per_s, r.break_even_s, s.price_per_byte)
                                      : std::numeric_limits<double>::infinity();
    out += fmt::format("{},{},{},{},{},{}\n", format_sig4(r.hash_rate), format_sig4(r.effective_rate),
                       format_sig4(r.break_even_s), format_sig4(r.break_even_s / 60.0), format_sig4(r.ads_to_mining),
                       format_sig4(cost_at_break_even));
  }
  return out;
}

}  // namespace webtb::profit
