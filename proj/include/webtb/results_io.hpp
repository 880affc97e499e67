#pragma once

// Campaign output directory: one probe-NNNN.jsonl per probe plus campaign.json.
// Files appear atomically, so a killed campaign leaves only complete probes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "webtb/records.hpp"

namespace webtb::harness {

class ResultsSink {
 public:
  /// Creates the directory and an initial manifest with status "running".
  ResultsSink(std::filesystem::path dir, nlohmann::json campaign_meta);

  /// Writes the next probe file and updates the manifest. Single writer.
  std::filesystem::path append(const ProbeResult& result);
  void finish(const std::string& status);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void write_manifest() const;

  std::filesystem::path dir_;
  nlohmann::json manifest_;
};

/// Complete probe results of a campaign directory in probe order; truncated files are
/// skipped. Reads "probe-*.jsonl" directly, so a missing manifest is tolerated.
std::vector<ProbeResult> load_results(const std::filesystem::path& dir);

/// All results under several campaign directories, in argument order.
std::vector<ProbeResult> load_results(const std::vector<std::filesystem::path>& dirs);

}  // namespace webtb::harness
