#include "webtb/power.hpp"

#include <algorithm>
#include <fstream>

namespace webtb::monitors {
namespace {

namespace fs = std::filesystem;

std::optional<std::uint64_t> read_u64(const fs::path& p) {
  std::ifstream in(p);
  std::uint64_t v = 0;
  if (!(in >> v)) return std::nullopt;
  return v;
}

std::string read_line(const fs::path& p) {
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  return s;
}

}  // namespace

double RailModel::watts(double cpu_fraction) const {
  return idle_w + slope_w * std::clamp(cpu_fraction, 0.0, 1.0);
}

SyntheticPowerModel SyntheticPowerModel::reference() {
  SyntheticPowerModel m;
  m.rails[Rail::rail_12v_a] = {32.4, 35.2};
  m.rails[Rail::rail_5v] = {4.46, 0.53};
  return m;
}

SyntheticPowerSource::SyntheticPowerSource(SyntheticPowerModel model, std::function<double()> cpu_fraction)
    : model_(std::move(model)), cpu_fraction_(std::move(cpu_fraction)) {}

std::vector<Rail> SyntheticPowerSource::rails() const {
  std::vector<Rail> out;
  for (const auto& [rail, _] : model_.rails) out.push_back(rail);
  return out;
}

std::vector<PowerSample> SyntheticPowerSource::read() {
  const double load = cpu_fraction_ ? cpu_fraction_() : 0.0;
  std::vector<PowerSample> out;
  for (const auto& [rail, model] : model_.rails) out.push_back({0.0, rail, model.watts(load)});
  return out;
}

ReplayPowerSource::ReplayPowerSource(ReplayTrace trace) : trace_(std::move(trace)) {
  for (const auto& ch : trace_.channels()) rails_.push_back(parse_rail(ch));
}

std::vector<PowerSample> ReplayPowerSource::read() {
  std::vector<PowerSample> out;
  for (const auto& r : trace_.next()) out.push_back({0.0, parse_rail(r.channel), r.value});
  return out;
}

std::optional<RaplPowerSource> RaplPowerSource::discover(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return std::nullopt;
  RaplPowerSource src;
  std::vector<fs::path> zones;
  for (const auto& e : fs::recursive_directory_iterator(root, fs::directory_options::follow_directory_symlink, ec)) {
    if (e.path().filename() == "energy_uj") zones.push_back(e.path().parent_path());
  }
  std::sort(zones.begin(), zones.end());
  bool have_cpu = false, have_mem = false;
  for (const auto& z : zones) {
    const auto name = read_line(z / "name");
    std::optional<Rail> rail;
    if (name.starts_with("package") && !have_cpu) {
      rail = Rail::rail_12v_a;
      have_cpu = true;
    } else if (name == "dram" && !have_mem) {
      rail = Rail::rail_5v;
      have_mem = true;
    }
    if (!rail) continue;
    const auto energy = read_u64(z / "energy_uj");
    if (!energy) continue;  // unreadable without privileges
    src.counters_.push_back({*rail, z / "energy_uj", read_u64(z / "max_energy_range_uj").value_or(0), *energy});
  }
  if (src.counters_.empty()) return std::nullopt;
  src.last_at_ = std::chrono::steady_clock::now();
  return src;
}

std::vector<Rail> RaplPowerSource::rails() const {
  std::vector<Rail> out;
  for (const auto& c : counters_) out.push_back(c.rail);
  return out;
}

std::vector<PowerSample> RaplPowerSource::read() {
  const auto now = std::chrono::steady_clock::now();
  const double dt = std::chrono::duration<double>(now - last_at_).count();
  last_at_ = now;
  std::vector<PowerSample> out;
  for (auto& c : counters_) {
    const auto e = read_u64(c.energy_uj);
    if (!e) continue;
    std::uint64_t delta = *e >= c.last_uj ? *e - c.last_uj : *e + (c.max_range_uj - c.last_uj);
    c.last_uj = *e;
    out.push_back({0.0, c.rail, dt > 0 ? static_cast<double>(delta) / 1e6 / dt : 0.0});
  }
  return out;
}

PowerMonitor::PowerMonitor(std::unique_ptr<PowerTelemetrySource> source) : source_(std::move(source)) {
  for (auto r : source_->rails()) channels_.emplace_back(to_string(r));
}

std::vector<Reading> PowerMonitor::sample() {
  std::vector<Reading> out;
  for (const auto& s : source_->read()) out.push_back({std::string(to_string(s.rail)), s.watts});
  return out;
}

}  // namespace webtb::monitors
