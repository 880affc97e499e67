#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "webtb/cpu_monitor.hpp"
#include "webtb/error.hpp"
#include "webtb/interference.hpp"
#include "webtb/network_recorder.hpp"
#include "webtb/power.hpp"
#include "webtb/replay.hpp"
#include "webtb/thermal.hpp"

using namespace webtb;
using namespace webtb::monitors;
namespace fs = std::filesystem;

namespace {

// Forked helper process; killed and reaped on destruction.
class Child {
 public:
  enum class Mode { spin, sleep, allocate };
  explicit Child(Mode mode) {
    pid_ = fork();
    if (pid_ == 0) {
      if (mode == Mode::allocate) {
        static std::vector<char> block;
        block.assign(64 << 20, 1);
      }
      volatile unsigned long x = 0;
      for (;;) {
        if (mode == Mode::spin) {
          ++x;
        } else {
          pause();
        }
      }
    }
  }
  ~Child() { reap(); }
  void reap() {
    if (pid_ <= 0) return;
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
};

double value_of(const std::vector<Reading>& readings, const std::string& channel) {
  for (const auto& r : readings) {
    if (r.channel == channel) return r.value;
  }
  ADD_FAILURE() << "missing channel " << channel;
  return 0.0;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("webtb_monitors_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

nlohmann::json at(double mono_s) { return {{"timestamp", mono_s}}; }

}  // namespace

TEST(CpuMonitor, BusyChildReadsNearOneCore) {
  Child child(Child::Mode::spin);
  CpuMonitor mon(2);
  EXPECT_EQ(mon.channels(), (std::vector<std::string>{"total", "thread_rank1", "thread_rank2"}));
  mon.start({child.pid(), {}});
  std::this_thread::sleep_for(std::chrono::milliseconds(1000));
  const auto r = mon.sample();
  // Shares the host with the test process; a single spinning thread cannot exceed 100%.
  EXPECT_GT(value_of(r, "total"), 40.0);
  EXPECT_LE(value_of(r, "total"), 105.0);
  EXPECT_GE(value_of(r, "thread_rank1"), value_of(r, "thread_rank2"));
}

TEST(CpuMonitor, SleepingChildReadsNearZero) {
  Child child(Child::Mode::sleep);
  CpuMonitor mon;
  mon.start({child.pid(), {}});
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  EXPECT_LT(value_of(mon.sample(), "total"), 5.0);
}

TEST(CpuMonitor, VanishedProcessTerminates) {
  Child child(Child::Mode::sleep);
  CpuMonitor mon;
  mon.start({child.pid(), {}});
  child.reap();
  EXPECT_THROW(mon.sample(), MonitorTerminated);
}

TEST(MemoryMonitor, CountsTouchedPages) {
  Child child(Child::Mode::allocate);
  MemoryMonitor mon;
  mon.start({child.pid(), {}});
  double resident = 0.0;
  for (int i = 0; i < 50 && resident < 64.0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    resident = value_of(mon.sample(), "resident_mb");
  }
  EXPECT_GE(resident, 64.0);
  child.reap();
  EXPECT_THROW(mon.sample(), MonitorTerminated);
}

TEST(ReplayTrace, GroupsRowsByTimestamp) {
  auto trace = ReplayTrace::parse("timestamp,channel,value\n0,core0,40\n0,core1,41\n1,core0,42\n");
  EXPECT_EQ(trace.tick_count(), 2u);
  EXPECT_EQ(trace.channels(), (std::vector<std::string>{"core0", "core1"}));
  EXPECT_EQ(trace.next().size(), 2u);
  EXPECT_DOUBLE_EQ(trace.next().at(0).value, 42.0);
  EXPECT_TRUE(trace.next().empty());
}

TEST(ReplayTrace, MalformedRowReportsLine) {
  try {
    ReplayTrace::parse("0,core0,40\n1,core0,hot\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ReplayTrace::parse("0,core0\n"), ParseError);
}

TEST(Thermal, HwmonDiscoveryNamesCoresAndOtherSensors) {
  const auto root = scratch_dir("hwmon");
  write(root / "hwmon0/name", "coretemp\n");
  write(root / "hwmon0/temp2_label", "Core 0\n");
  write(root / "hwmon0/temp2_input", "45000\n");
  write(root / "hwmon0/temp3_label", "Core 1\n");
  write(root / "hwmon0/temp3_input", "47500\n");
  write(root / "hwmon1/name", "acpitz\n");
  write(root / "hwmon1/temp1_input", "30000\n");
  auto src = HwmonThermalSource::discover(root);
  ASSERT_TRUE(src.has_value());
  EXPECT_EQ(src->channels(), (std::vector<std::string>{"core0", "core1", "acpitz_temp1"}));
  const auto r = src->read();
  EXPECT_DOUBLE_EQ(value_of(r, "core1"), 47.5);
  EXPECT_FALSE(HwmonThermalSource::discover(root / "absent").has_value());
  fs::remove_all(root);
}

TEST(Thermal, ReplayMonitorReportsTraceChannels) {
  TemperatureMonitor mon(std::make_unique<ReplayThermalSource>(ReplayTrace::parse("0,core0,50\n1,core0,51\n")));
  EXPECT_EQ(mon.channels(), (std::vector<std::string>{"core0"}));
  EXPECT_DOUBLE_EQ(mon.sample().at(0).value, 50.0);
  EXPECT_DOUBLE_EQ(mon.sample().at(0).value, 51.0);
}

TEST(Power, ReferenceModelHitsCalibrationPoints) {
  const auto m = SyntheticPowerModel::reference();
  EXPECT_NEAR(m.rails.at(Rail::rail_12v_a).watts(0.0), 32.4, 1e-9);
  EXPECT_NEAR(m.rails.at(Rail::rail_12v_a).watts(1.0), 67.6, 1e-9);
  EXPECT_NEAR(m.rails.at(Rail::rail_5v).watts(0.0), 4.46, 1e-9);
  EXPECT_NEAR(m.rails.at(Rail::rail_5v).watts(1.0), 4.99, 1e-9);
}

TEST(Power, SyntheticIsAffineAndClamped) {
  const RailModel r{10.0, 20.0};
  for (double f = 0.0; f <= 1.0; f += 0.125) EXPECT_NEAR(r.watts(f), 10.0 + 20.0 * f, 1e-12);
  EXPECT_DOUBLE_EQ(r.watts(-0.5), 10.0);
  EXPECT_DOUBLE_EQ(r.watts(3.0), 30.0);

  double load = 0.5;
  PowerMonitor mon(std::make_unique<SyntheticPowerSource>(SyntheticPowerModel::reference(), [&] { return load; }));
  EXPECT_EQ(mon.channels(), (std::vector<std::string>{"rail_12v_a", "rail_5v"}));
  EXPECT_NEAR(value_of(mon.sample(), "rail_12v_a"), 50.0, 1e-9);
}

TEST(Power, ReplayRejectsUnknownRail) {
  EXPECT_THROW(ReplayPowerSource(ReplayTrace::parse("0,rail_9v,1\n")), std::invalid_argument);
  PowerMonitor mon(std::make_unique<ReplayPowerSource>(ReplayTrace::parse("0,rail_5v,4.5\n")));
  EXPECT_DOUBLE_EQ(value_of(mon.sample(), "rail_5v"), 4.5);
}

TEST(Power, RaplCountersGiveAveragePowerAcrossWrap) {
  const auto root = scratch_dir("powercap");
  write(root / "intel-rapl:0/name", "package-0\n");
  write(root / "intel-rapl:0/energy_uj", "1000000\n");
  write(root / "intel-rapl:0/max_energy_range_uj", "2000000\n");
  auto src = RaplPowerSource::discover(root);
  ASSERT_TRUE(src.has_value());
  ASSERT_EQ(src->rails(), (std::vector<Rail>{Rail::rail_12v_a}));
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  // 1.5 J elapsed with a wrap at 2 J.
  write(root / "intel-rapl:0/energy_uj", "500000\n");
  const auto s = src->read();
  ASSERT_EQ(s.size(), 1u);
  EXPECT_GT(s[0].watts, 1.5 / 0.4);
  EXPECT_LT(s[0].watts, 1.5 / 0.19);
  fs::remove_all(root);
}

TEST(NetworkRecorder, RequestsFramesAndCounters) {
  NetworkRecorder rec;
  const auto origin = std::chrono::steady_clock::now();
  const double t0 = monotonic_seconds(origin);
  rec.begin(origin);
  rec.on_event("Network.requestWillBeSent",
               {{"requestId", "1"}, {"timestamp", t0 + 0.5}, {"type", "Document"},
                {"request", {{"url", "http://h/page"}}}, {"initiator", {{"type", "other"}}}});
  rec.on_event("Network.responseReceived", {{"requestId", "1"}, {"response", {{"status", 200}}}});
  rec.on_event("Network.dataReceived", {{"requestId", "1"}, {"encodedDataLength", 100}});
  rec.on_event("Network.loadingFinished", {{"requestId", "1"}, {"encodedDataLength", 321.0}});
  rec.on_event("Network.requestWillBeSent",
               {{"requestId", "2"}, {"timestamp", t0 + 0.6}, {"request", {{"url", "http://h/missing"}}}});
  rec.on_event("Network.dataReceived", {{"requestId", "2"}, {"encodedDataLength", 7}});
  rec.on_event("Network.loadingFailed", {{"requestId", "2"}});
  rec.on_event("Network.webSocketCreated", {{"requestId", "ws"}, {"url", "ws://h/msp/pow"}});
  rec.on_event("Network.webSocketFrameReceived",
               {{"requestId", "ws"}, {"timestamp", t0 + 1.0}, {"response", {{"opcode", 1}, {"payloadData", "abcd"}}}});
  rec.on_event("Network.webSocketFrameSent",
               {{"requestId", "ws"}, {"timestamp", t0 + 2.0}, {"response", {{"opcode", 2}, {"payloadData", "AAAA"}}}});
  rec.end();
  rec.on_event("Network.webSocketFrameSent",
               {{"requestId", "ws"}, {"timestamp", t0 + 3.0}, {"response", {{"opcode", 1}, {"payloadData", "late"}}}});

  const auto requests = rec.requests();
  ASSERT_EQ(requests.size(), 2u);
  EXPECT_EQ(requests[0].transferred_bytes, 321);
  EXPECT_EQ(requests[0].status_code, 200);
  EXPECT_NEAR(requests[0].t, 0.5, 1e-6);
  EXPECT_EQ(requests[1].transferred_bytes, 7);
  const auto frames = rec.frames();
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].payload_bytes, 4);
  EXPECT_EQ(frames[1].payload_bytes, 3);  // base64 "AAAA" decodes to 3 bytes
  EXPECT_EQ(frames[1].endpoint_url, "ws://h/msp/pow");
  EXPECT_DOUBLE_EQ(value_of(rec.sample(), "request_bytes"), 328.0);
  EXPECT_DOUBLE_EQ(value_of(rec.sample(), "ws_bytes"), 7.0);
  EXPECT_FALSE(rec.gap());
}

TEST(NetworkRecorder, OverflowSetsGapButKeepsCounting) {
  NetworkRecorder rec(1);
  rec.begin(std::chrono::steady_clock::now());
  rec.on_event("Network.webSocketCreated", {{"requestId", "ws"}, {"url", "ws://h/msp/pow"}});
  for (int i = 0; i < 3; ++i) {
    rec.on_event("Network.webSocketFrameSent", {{"requestId", "ws"}, {"response", {{"payloadData", "xx"}}}});
  }
  EXPECT_EQ(rec.frames().size(), 1u);
  EXPECT_TRUE(rec.gap());
  EXPECT_DOUBLE_EQ(value_of(rec.sample(), "ws_bytes"), 6.0);
}

TEST(Interference, CalibrationRequiredAndSelfRatioNearOne) {
  InterferenceBenchmark bench;
  EXPECT_THROW(bench.run(1, 0.3), CalibrationMissing);
  bench.calibrate({1}, 0.2);
  ASSERT_TRUE(bench.baseline(1, 0.2).has_value());
  EXPECT_GT(*bench.baseline(1, 0.2), 0);
  // Shared hosts drift by tens of percent over seconds, so each round recalibrates
  // right before its run and the median round is compared.
  std::vector<double> ratios;
  for (int i = 0; i < 5; ++i) {
    bench.calibrate({1}, 0.2);
    ratios.push_back(bench.run(1, 0.2).ratio());
  }
  std::sort(ratios.begin(), ratios.end());
  EXPECT_NEAR(ratios[2], 1.0, 0.20);
  EXPECT_THROW(bench.run(2, 0.2), CalibrationMissing);
}

TEST(Interference, ContendedRunCompletesFewerOps) {
  InterferenceBenchmark bench;
  bench.calibrate({1}, 0.5);
  Child hog(Child::Mode::spin);
  // On one core the hog takes about half the time slices.
  const auto out = bench.run(1, 0.5);
  EXPECT_LT(out.ratio(), 0.9);
}
