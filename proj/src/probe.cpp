#include "webtb/probe.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "webtb/error.hpp"
#include "webtb/results_io.hpp"

namespace webtb::harness {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t unix_ms_now() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

double seconds_since(Clock::time_point origin) { return std::chrono::duration<double>(Clock::now() - origin).count(); }

Clock::duration to_duration(double s) {
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

/// Serialized delivery of monitor readings from the sampling threads.
class Collector {
 public:
  void deliver(const std::string& monitor, double t, std::vector<monitors::Reading> readings) {
    std::lock_guard lock(mu_);
    auto& s = series_[monitor];
    for (auto& r : readings) s.samples.push_back(Sample{t, std::move(r.channel), r.value});
  }
  void flag_gap(const std::string& monitor, const std::string& note) {
    std::lock_guard lock(mu_);
    auto& s = series_[monitor];
    s.gap = true;
    if (s.note.empty()) s.note = note;
  }
  std::map<std::string, SampleSeries> take() {
    std::lock_guard lock(mu_);
    return std::move(series_);
  }

 private:
  std::mutex mu_;
  std::map<std::string, SampleSeries> series_;
};

/// Runs one sampling thread per monitor until the phase ends or a monitor reports
/// that the browser is gone.
class PhaseSampler {
 public:
  PhaseSampler(std::vector<monitors::Monitor*> monitors, Clock::time_point origin, double interval_s,
               double duration_s)
      : monitors_(std::move(monitors)), origin_(origin), interval_s_(interval_s), duration_s_(duration_s) {}

  ~PhaseSampler() {
    cancel();
    join();
  }

  void start() {
    for (auto* m : monitors_) threads_.emplace_back([this, m] { run(m); });
  }

  void cancel() {
    {
      std::lock_guard lock(mu_);
      cancelled_ = true;
    }
    cv_.notify_all();
  }

  // Without sampling threads the phase window is still held open.
  void join() {
    if (threads_.empty()) {
      std::unique_lock lock(mu_);
      cv_.wait_until(lock, origin_ + to_duration(duration_s_), [&] { return cancelled_; });
    }
    for (auto& t : threads_) {
      if (t.joinable()) t.join();
    }
  }

  Collector& collector() { return collector_; }
  std::exception_ptr failure() const { return failure_; }

 private:
  void run(monitors::Monitor* m) {
    const auto ticks = static_cast<long>(std::floor(duration_s_ / interval_s_ + 1e-9));
    for (long k = 1; k <= ticks; ++k) {
      const auto due = origin_ + to_duration(static_cast<double>(k) * interval_s_);
      {
        std::unique_lock lock(mu_);
        if (cv_.wait_until(lock, due, [&] { return cancelled_; })) return;
      }
      // A tick missed by more than a full interval is skipped, not sampled late.
      if (Clock::now() - due > to_duration(interval_s_)) {
        collector_.flag_gap(m->id(), "sampling fell behind; ticks skipped");
        continue;
      }
      try {
        collector_.deliver(m->id(), static_cast<double>(k) * interval_s_, m->sample());
      } catch (const monitors::MonitorTerminated&) {
        {
          std::lock_guard lock(mu_);
          if (!failure_) failure_ = std::current_exception();
        }
        cancel();
        return;
      }
    }
  }

  std::vector<monitors::Monitor*> monitors_;
  Clock::time_point origin_;
  double interval_s_;
  double duration_s_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool cancelled_ = false;
  std::exception_ptr failure_;
  Collector collector_;
};

std::vector<monitors::Monitor*> enabled(const MonitorSet& set, const std::set<std::string>& ids) {
  std::vector<monitors::Monitor*> out;
  for (const auto& m : set.sampled) {
    if (ids.contains(m->id())) out.push_back(m.get());
  }
  if (set.network && ids.contains(set.network->id())) out.push_back(set.network.get());
  return out;
}

void empty_series(ProbeResult& r, const std::vector<monitors::Monitor*>& monitors) {
  for (auto* m : monitors) {
    auto& s = r.phase1[m->id()];
    s.monitor_id = m->id();
    s.unit = m->unit();
    s.channels = m->channels();
  }
}

/// One attempt. Throws DriverCrashed / MonitorTerminated for the retry logic.
void attempt_probe(const ProbeConfig& config, BrowserDriver& driver, MonitorSet& set, ProbeResult& r) {
  const auto monitors = enabled(set, config.enabled_monitors);
  empty_series(r, monitors);
  r.browser = driver.metadata();
  r.browser["pid"] = driver.browser_pid();
  r.phase1_duration_s = config.phase1_duration_s;

  const monitors::MonitorContext ctx{driver.browser_pid(), config.cpu_set};
  for (auto* m : monitors) m->start(ctx);

  const bool record_network = set.network && config.enabled_monitors.contains(set.network->id());
  int token = 0;
  const auto origin = Clock::now();
  r.phase1_start_unix_ms = unix_ms_now();
  if (record_network) {
    set.network->begin(origin);
    token = driver.subscribe(
        [rec = set.network.get()](const std::string& method, const nlohmann::json& params) { rec->on_event(method, params); });
  }

  PhaseSampler sampler(monitors, origin, config.sample_interval_s, config.phase1_duration_s);
  sampler.start();
  std::exception_ptr crash;
  NavigationResult nav;
  try {
    nav = driver.navigate(config.target_url, config.navigation_timeout);
  } catch (const DriverCrashed&) {
    crash = std::current_exception();
  }
  if (crash || !nav.ok) sampler.cancel();
  sampler.join();
  r.phase1_end_s = seconds_since(origin);
  for (auto* m : monitors) m->stop();
  if (record_network) {
    driver.unsubscribe(token);
    set.network->end();
    r.requests = set.network->requests();
    r.frames = set.network->frames();
    r.network_gap = set.network->gap();
  }

  for (auto& [id, s] : sampler.collector().take()) {
    auto& dst = r.phase1[id];
    dst.samples = std::move(s.samples);
    std::stable_sort(dst.samples.begin(), dst.samples.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    dst.gap = s.gap;
    dst.note = s.note;
  }
  if (record_network && r.network_gap) {
    auto& s = r.phase1[set.network->id()];
    s.gap = true;
    if (s.note.empty()) s.note = "network record limit reached";
  }

  if (crash) std::rethrow_exception(crash);
  if (auto failure = sampler.failure()) std::rethrow_exception(failure);
  if (!nav.ok) {
    r.ok = false;
    r.error = "navigation failed: " + nav.error;
    driver.purge_state();
    return;
  }
  r.ok = true;
  driver.purge_state();

  if (!set.interference || !config.enabled_monitors.contains("interference")) return;
  for (int workers : set.interference_workers) {
    const auto reload = driver.navigate(config.target_url, config.navigation_timeout);
    if (!reload.ok) {
      r.ok = false;
      r.error = "phase 2 navigation failed: " + reload.error;
      driver.purge_state();
      return;
    }
    r.phase2.push_back(set.interference->run(workers, config.phase2_duration_s));
    if (!driver.running()) throw DriverCrashed("browser exited during phase 2");
    driver.purge_state();
  }
}

}  // namespace

void validate(const ProbeConfig& c) {
  if (!(c.phase1_duration_s > 0.0) || !(c.phase2_duration_s > 0.0)) {
    throw std::invalid_argument("phase durations must be > 0");
  }
  if (!(c.sample_interval_s > 0.0) || c.sample_interval_s > c.phase1_duration_s ||
      c.sample_interval_s > c.phase2_duration_s) {
    throw std::invalid_argument("sample interval must be > 0 and no longer than either phase");
  }
  if (c.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (c.navigation_timeout.count() <= 0) throw std::invalid_argument("navigation timeout must be > 0");
  for (const auto& id : c.enabled_monitors) {
    if (!kMonitorIds.contains(id)) throw std::invalid_argument("unknown monitor: " + id);
  }
}

ProbeResult run_probe(const ProbeConfig& config, BrowserDriver& driver, MonitorSet& monitors) {
  validate(config);
  ProbeResult r;
  for (int attempt = 1;; ++attempt) {
    r = ProbeResult{};
    r.target_url = config.target_url;
    r.attempts = attempt;
    std::string failure;
    try {
      if (!driver.running()) driver.restart();
      attempt_probe(config, driver, monitors, r);
      return r;
    } catch (const DriverCrashed& e) {
      failure = std::string("browser crashed: ") + e.what();
    } catch (const monitors::MonitorTerminated& e) {
      failure = std::string("browser exited: ") + e.what();
    } catch (const PurgeError&) {
      throw;
    } catch (const DriverError& e) {
      failure = std::string("driver error: ") + e.what();
    }
    driver.restart();
    if (attempt > config.max_retries) {
      r.ok = false;
      r.error = failure;
      return r;
    }
  }
}

std::vector<ProbeResult> run_campaign(const std::vector<std::string>& targets, const ProbeConfig& templ,
                                      BrowserDriver& driver, MonitorSet& monitors, ResultsSink* sink,
                                      const ProbeObserver& observer) {
  if (targets.empty()) throw std::invalid_argument("campaign needs at least one target");
  validate(templ);
  if (!driver.running()) driver.start();

  if (monitors.interference && templ.enabled_monitors.contains("interference")) {
    std::vector<int> missing;
    for (int w : monitors.interference_workers) {
      if (!monitors.interference->baseline(w, templ.phase2_duration_s)) missing.push_back(w);
    }
    if (!missing.empty()) {
      driver.purge_state();
      monitors.interference->calibrate(missing, templ.phase2_duration_s);
    }
  }

  std::vector<ProbeResult> results;
  try {
    driver.purge_state();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      auto config = templ;
      config.target_url = targets[i];
      results.push_back(run_probe(config, driver, monitors));
      if (sink) sink->append(results.back());
      if (observer) observer(i, results.back());
    }
  } catch (const PurgeError&) {
    if (sink) sink->finish("aborted: state purge failed");
    throw;
  }
  if (sink) sink->finish("complete");
  return results;
}

}  // namespace webtb::harness
