#include "webtb/results_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "webtb/report.hpp"

namespace webtb::harness {

ResultsSink::ResultsSink(std::filesystem::path dir, nlohmann::json campaign_meta) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  manifest_ = {{"status", "running"}, {"campaign", std::move(campaign_meta)}, {"probes", nlohmann::json::array()}};
  write_manifest();
}

std::filesystem::path ResultsSink::append(const ProbeResult& result) {
  const auto index = manifest_["probes"].size();
  const auto name = fmt::format("probe-{:04d}.jsonl", index);
  const auto path = dir_ / name;
  stats::write_file_atomic(path, to_jsonl(result));
  manifest_["probes"].push_back(
      {{"index", index}, {"file", name}, {"target_url", result.target_url}, {"ok", result.ok}, {"error", result.error}});
  write_manifest();
  return path;
}

void ResultsSink::finish(const std::string& status) {
  manifest_["status"] = status;
  write_manifest();
}

void ResultsSink::write_manifest() const { stats::write_file_atomic(dir_ / "campaign.json", manifest_.dump(2) + "\n"); }

std::vector<ProbeResult> load_results(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with("probe-") && name.ends_with(".jsonl")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProbeResult> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    if (auto r = from_jsonl(ss.str())) out.push_back(std::move(*r));
  }
  return out;
}

std::vector<ProbeResult> load_results(const std::vector<std::filesystem::path>& dirs) {
  std::vector<ProbeResult> out;
  for (const auto& d : dirs) {
    auto part = load_results(d);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace webtb::harness
