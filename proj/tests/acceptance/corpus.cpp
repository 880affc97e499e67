#include "acceptance/corpus.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace webtb::acceptance {
namespace {

struct Library {
  std::string label;
  std::string host;    // script host, listed as a domain
  std::string script;  // file name, listed as a URL substring
  std::string keyword; // inline marker, listed as a keyword
};

const std::vector<Library>& libraries() {
  static const std::vector<Library> kLibs = {
      {"coinhive", "coinhive.com", "coinhive.min.js", "coinhive.anonymous"},
      {"cryptoloot", "crypto-loot.com", "cryptoloot.pro.js", "cryptoloot.pro"},
      {"deepminer", "deepminer.net", "deepminer.js", "deepminer.init"},
      {"jsecoin", "jsecoin.com", "jsecoin-load.js", "jsecoin_fmt"},
      {"webmine", "webmine.pro", "webmine.rpc.js", "webmine.start"},
  };
  return kLibs;
}

const std::vector<std::string> kAdHosts = {"doubleclick.net", "adnxs.com", "adsrvr.org"};
const std::vector<std::string> kBenignHosts = {"example.org", "static.example.net", "fonts.example.com"};
const std::vector<std::string> kBenignWords = {"weather", "recipe", "travel", "gallery", "article", "comment"};

detect::Blacklist parse(const std::string& text, detect::Category c, const std::string& name) {
  return detect::Blacklist(detect::parse_blacklist(text, detect::ListFormat::plain_lines, c), {name});
}

}  // namespace

DetectorCorpus make_detector_corpus(std::size_t page_count, std::uint64_t seed) {
  std::string miner_list;
  for (const auto& lib : libraries()) {
    miner_list += lib.host + " " + lib.label + "\n";
    miner_list += lib.script + " " + lib.label + "\n";
    miner_list += lib.keyword + " " + lib.label + "\n";
  }
  std::string ad_list;
  for (const auto& h : kAdHosts) ad_list += h + "\n";

  DetectorCorpus corpus;
  corpus.blacklist = detect::merge_blacklists(
      {parse(miner_list, detect::Category::miner, "miners"), parse(ad_list, detect::Category::ad, "ads")});

  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (std::size_t i = 0; i < page_count; ++i) {
    PlantedPage p;
    p.page.url = fmt::format("https://site{:03}.example.org/", i);
    std::string body = "<html><body>";
    for (int w = 0; w < 4; ++w) body += kBenignWords[pick(kBenignWords.size())] + " ";
    for (int r = 0; r < 3; ++r) {
      p.page.request_urls.push_back(
          fmt::format("https://{}/asset{}.css", kBenignHosts[pick(kBenignHosts.size())], pick(100)));
    }

    const auto miner_count = pick(3);  // 0..2 libraries
    std::vector<std::size_t> order(libraries().size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t m = 0; m < miner_count; ++m) {
      const auto& lib = libraries()[order[m]];
      p.libraries.insert(lib.label);
      switch (pick(3)) {
        case 0: p.page.request_urls.push_back(fmt::format("https://{}/lib/loader{}.js", lib.host, i)); break;
        case 1: p.page.request_urls.push_back(fmt::format("https://cdn.example.net/js/{}", lib.script)); break;
        default: body += "<script>var m = " + lib.keyword + "(0.5);</script>"; break;
      }
    }

    p.ad_slots = static_cast<int>(pick(4));  // 0..3 slots
    for (int s = 0; s < p.ad_slots; ++s) {
      const auto url = fmt::format("https://ad.{}/slot?p={}&s={}", kAdHosts[pick(kAdHosts.size())], i, s);
      p.page.request_urls.push_back(url);
      if (pick(2) == 0) p.page.request_urls.push_back(url);  // repeated fetch is still one slot
    }
    std::shuffle(p.page.request_urls.begin(), p.page.request_urls.end(), rng);
    p.page.body_text = body + "</body></html>";
    corpus.pages.push_back(std::move(p));
  }
  return corpus;
}

std::vector<detect::Blacklist> make_overlapping_lists(std::mt19937_64& rng, std::size_t list_count) {
  static const std::vector<std::string> kPatterns = {
      "coinhive.com",  "crypto-loot.com", "deepminer.net", "coinhive.min.js", "cryptoloot.pro.js",
      "deepminer.js",  "webmine.pro",     "jsecoin.com",   "miner.start",     "/lib/cryptonight",
      "minero.cc",     "coin-have.com",   "ppoi.org",      "monerominer",     "authedmine.com"};
  static const std::vector<std::string> kLabels = {"alpha", "beta", "gamma", ""};
  std::vector<detect::Blacklist> lists;
  for (std::size_t l = 0; l < list_count; ++l) {
    std::string text;
    const auto n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& pattern = kPatterns[std::uniform_int_distribution<std::size_t>(0, kPatterns.size() - 1)(rng)];
      const auto& label = kLabels[std::uniform_int_distribution<std::size_t>(0, kLabels.size() - 1)(rng)];
      text += pattern + (label.empty() ? "" : " " + label) + "\n";
    }
    const auto cat = std::bernoulli_distribution(0.8)(rng) ? detect::Category::miner : detect::Category::ad;
    lists.push_back(parse(text, cat, fmt::format("list{}", l)));
  }
  return lists;
}

std::vector<detect::DetectionReport> make_market_share_reports(std::mt19937_64& rng) {
  std::vector<detect::DetectionReport> reports;
  auto miner_report = [&](std::vector<std::string> labels) {
    detect::DetectionReport r;
    r.url = fmt::format("https://m{}.example.org/", reports.size());
    for (const auto& l : labels) r.miners_detected.push_back({l, l + ".js", "body"});
    r.classification = detect::Classification::miner_supported;
    reports.push_back(std::move(r));
  };
  // Ten coinhive pages also load cryptoloot; a page counts once per library.
  for (int i = 0; i < 59; ++i) miner_report({"coinhive"});
  for (int i = 0; i < 10; ++i) miner_report({"coinhive", "cryptoloot", "coinhive"});
  for (int i = 0; i < 3; ++i) miner_report({"cryptoloot"});
  const std::vector<std::string> others = {"deepminer", "jsecoin", "webmine"};
  for (int i = 0; i < 28; ++i) miner_report({others[static_cast<std::size_t>(i) % others.size()]});
  for (int i = 0; i < 40; ++i) {
    detect::DetectionReport r;
    r.url = fmt::format("https://a{}.example.org/", i);
    r.ad_slot_count = 1 + i % 3;
    r.classification = detect::Classification::ad_supported;
    reports.push_back(std::move(r));
  }
  std::shuffle(reports.begin(), reports.end(), rng);
  return reports;
}

}  // namespace webtb::acceptance
