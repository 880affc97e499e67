#include "webtb/thermal.hpp"

#include <algorithm>
#include <fstream>
#include <regex>

namespace webtb::monitors {
namespace {

namespace fs = std::filesystem;

std::string read_line(const fs::path& p) {
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  return s;
}

}  // namespace

std::optional<HwmonThermalSource> HwmonThermalSource::discover(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return std::nullopt;
  HwmonThermalSource src;
  static const std::regex core_label(R"(Core\s+(\d+))");
  static const std::regex input_name(R"(temp(\d+)_input)");

  std::vector<fs::path> chips;
  for (const auto& e : fs::directory_iterator(root, ec)) chips.push_back(e.path());
  std::sort(chips.begin(), chips.end());
  for (const auto& chip : chips) {
    const auto chip_name = read_line(chip / "name");
    std::vector<fs::path> inputs;
    for (const auto& f : fs::directory_iterator(chip, ec)) {
      if (std::regex_match(f.path().filename().string(), input_name)) inputs.push_back(f.path());
    }
    std::sort(inputs.begin(), inputs.end());
    for (const auto& in : inputs) {
      std::smatch m;
      const auto fname = in.filename().string();
      std::regex_match(fname, m, input_name);
      auto label = read_line(chip / ("temp" + m[1].str() + "_label"));
      std::smatch cm;
      std::string channel;
      if (std::regex_search(label, cm, core_label)) {
        channel = "core" + cm[1].str();
      } else {
        if (label.empty()) label = "temp" + m[1].str();
        std::replace(label.begin(), label.end(), ' ', '_');
        channel = (chip_name.empty() ? chip.filename().string() : chip_name) + "_" + label;
      }
      src.inputs_.push_back({channel, in});
    }
  }
  if (src.inputs_.empty()) return std::nullopt;
  return src;
}

std::vector<std::string> HwmonThermalSource::channels() const {
  std::vector<std::string> out;
  for (const auto& i : inputs_) out.push_back(i.channel);
  return out;
}

std::vector<Reading> HwmonThermalSource::read() {
  std::vector<Reading> out;
  for (const auto& i : inputs_) {
    const auto raw = read_line(i.path);
    if (raw.empty()) continue;
    try {
      out.push_back({i.channel, std::stod(raw) / 1000.0});  // millidegrees
    } catch (const std::exception&) {
    }
  }
  return out;
}

TemperatureMonitor::TemperatureMonitor(std::unique_ptr<ThermalSource> source)
    : source_(std::move(source)), channels_(source_->channels()) {}

}  // namespace webtb::monitors
