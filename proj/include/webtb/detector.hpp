#pragma once

// Page classification against a merged blacklist and library market shares.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "webtb/signature.hpp"

namespace webtb::detect {

struct PageSnapshot {
  std::string url;
  std::string body_text;
  std::vector<std::string> request_urls;
};

struct MinerHit {
  std::string library_label;
  std::string matched_pattern;
  std::string matched_in;  // "body" or the request URL that matched
  friend bool operator==(const MinerHit&, const MinerHit&) = default;
};

enum class Classification { miner_supported, ad_supported, both, neither };
std::string_view to_string(Classification c);

struct DetectionReport {
  std::string url;
  std::vector<MinerHit> miners_detected;
  int ad_slot_count = 0;
  Classification classification = Classification::neither;

  /// Distinct library labels among the hits, sorted.
  std::vector<std::string> libraries() const;
};

/// True when `entry` matches `request_url` under the matching rules
/// (host suffix for domains, case-insensitive substring otherwise).
bool entry_matches_url(const SignatureEntry& entry, std::string_view request_url);

DetectionReport classify_page(const PageSnapshot& page, const Blacklist& bl);

/// Fraction of miner-supported pages using each library; pages with several
/// libraries count once per library. Empty input gives an empty map.
std::map<std::string, double> market_share(const std::vector<DetectionReport>& reports);

void to_json(nlohmann::json& j, const DetectionReport& r);
void to_json(nlohmann::json& j, const PageSnapshot& p);
void from_json(const nlohmann::json& j, PageSnapshot& p);

/// Loads every *.json snapshot in a directory, sorted by file name.
std::vector<PageSnapshot> load_snapshots(const std::string& dir);

}  // namespace webtb::detect
