#include "webtb/detector.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "webtb/url.hpp"

namespace webtb::detect {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::miner_supported: return "miner_supported";
    case Classification::ad_supported: return "ad_supported";
    case Classification::both: return "both";
    case Classification::neither: return "neither";
  }
  return "?";
}

std::vector<std::string> DetectionReport::libraries() const {
  std::set<std::string> labels;
  for (const auto& hit : miners_detected) labels.insert(hit.library_label);
  return {labels.begin(), labels.end()};
}

bool entry_matches_url(const SignatureEntry& entry, std::string_view request_url) {
  if (entry.kind == PatternKind::domain) {
    return host_matches_domain(url_host(request_url), entry.pattern);
  }
  return to_lower(request_url).find(entry.pattern) != std::string::npos;
}

DetectionReport classify_page(const PageSnapshot& page, const Blacklist& bl) {
  DetectionReport report;
  report.url = page.url;
  const auto body = to_lower(page.body_text);

  std::vector<std::string> lowered_urls;
  lowered_urls.reserve(page.request_urls.size());
  for (const auto& u : page.request_urls) lowered_urls.push_back(to_lower(u));

  std::set<std::string> ad_urls;
  for (const auto& entry : bl.entries()) {
    if (entry.category == Category::miner) {
      if (body.find(entry.pattern) != std::string::npos) {
        report.miners_detected.push_back({entry.attribution(), entry.pattern, "body"});
        continue;
      }
      for (std::size_t i = 0; i < lowered_urls.size(); ++i) {
        if (entry_matches_url(entry, lowered_urls[i])) {
          report.miners_detected.push_back({entry.attribution(), entry.pattern, page.request_urls[i]});
          break;
        }
      }
    } else {
      for (const auto& u : lowered_urls) {
        if (entry_matches_url(entry, u)) ad_urls.insert(u);
      }
    }
  }
  report.ad_slot_count = static_cast<int>(ad_urls.size());

  const bool miner = !report.miners_detected.empty();
  const bool ads = report.ad_slot_count > 0;
  report.classification = miner && ads ? Classification::both
                          : miner      ? Classification::miner_supported
                          : ads        ? Classification::ad_supported
                                       : Classification::neither;
  return report;
}

std::map<std::string, double> market_share(const std::vector<DetectionReport>& reports) {
  std::map<std::string, std::size_t> counts;
  std::size_t miner_pages = 0;
  for (const auto& r : reports) {
    if (r.miners_detected.empty()) continue;
    ++miner_pages;
    for (const auto& lib : r.libraries()) ++counts[lib];
  }
  std::map<std::string, double> shares;
  for (const auto& [lib, n] : counts) {
    shares[lib] = static_cast<double>(n) / static_cast<double>(miner_pages);
  }
  return shares;
}

void to_json(nlohmann::json& j, const DetectionReport& r) {
  auto hits = nlohmann::json::array();
  for (const auto& h : r.miners_detected) {
    hits.push_back({{"library_label", h.library_label},
                    {"matched_pattern", h.matched_pattern},
                    {"matched_in", h.matched_in}});
  }
  j = nlohmann::json{{"url", r.url},
                     {"miners_detected", std::move(hits)},
                     {"ad_slot_count", r.ad_slot_count},
                     {"classification", to_string(r.classification)}};
}

void to_json(nlohmann::json& j, const PageSnapshot& p) {
  j = nlohmann::json{{"url", p.url}, {"body_text", p.body_text}, {"request_urls", p.request_urls}};
}

void from_json(const nlohmann::json& j, PageSnapshot& p) {
  p.url = j.at("url").get<std::string>();
  p.body_text = j.value("body_text", std::string{});
  p.request_urls = j.value("request_urls", std::vector<std::string>{});
  if (url_host(p.url).empty()) throw std::invalid_argument("snapshot url is not absolute: " + p.url);
}

std::vector<PageSnapshot> load_snapshots(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PageSnapshot> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      out.push_back(nlohmann::json::parse(in).get<PageSnapshot>());
    } catch (const std::exception& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace webtb::detect
