#pragma once

// Synthetic inputs with planted ground truth for the acceptance checks.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "webtb/detector.hpp"
#include "webtb/signature.hpp"

namespace webtb::acceptance {

struct PlantedPage {
  detect::PageSnapshot page;
  std::set<std::string> libraries;  // miner library labels planted on the page
  int ad_slots = 0;                 // distinct ad resource URLs planted
};

struct DetectorCorpus {
  detect::Blacklist blacklist;
  std::vector<PlantedPage> pages;
};

/// Pages carry miners by script host, by script file name on a neutral host, or by an
/// inline keyword, plus ad resources and benign noise that shares no text with any
/// signature.
DetectorCorpus make_detector_corpus(std::size_t page_count, std::uint64_t seed);

/// Lists drawn from one overlapping pool, so keys repeat across lists with differing labels.
std::vector<detect::Blacklist> make_overlapping_lists(std::mt19937_64& rng, std::size_t list_count);

/// 100 miner-supported reports: 69 with coinhive, 13 with cryptoloot, the rest with
/// other libraries; plus non-miner reports that must not enter the denominator.
std::vector<detect::DetectionReport> make_market_share_reports(std::mt19937_64& rng);

}  // namespace webtb::acceptance
