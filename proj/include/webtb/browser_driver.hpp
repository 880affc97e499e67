#pragma once

#include <sys/types.h>

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "webtb/cdp.hpp"

namespace webtb {

struct NavigationResult {
  bool ok = false;
  std::string error;
  double load_time_s = 0.0;
};

struct LaunchSpec {
  std::string executable;
  std::vector<std::string> args;
  std::vector<int> cpu_set;  // empty: inherit
  bool discard_stderr = true;
  /// How long to listen for asynchronous registration events after enabling a domain.
  std::chrono::milliseconds event_settle{0};
};

/// Chromium-family browser in headless mode, controlled over fds 3/4.
LaunchSpec chromium_launch(const std::string& executable, std::vector<int> cpu_set = {});
/// The scripted stand-in browser shipped with the toolkit.
LaunchSpec mock_launch(const std::string& executable, std::vector<int> cpu_set = {});
/// First of the usual Chromium executable names found on PATH, or empty.
std::string find_chromium();

class BrowserDriver {
 public:
  virtual ~BrowserDriver() = default;

  virtual void start() = 0;
  virtual void stop() = 0;
  virtual void restart() {
    stop();
    start();
  }
  virtual bool running() const = 0;
  virtual pid_t browser_pid() const = 0;
  virtual nlohmann::json metadata() const = 0;

  virtual NavigationResult navigate(const std::string& url, std::chrono::milliseconds timeout) = 0;
  /// Clears cookies, cache, storage and service workers for every origin visited since
  /// start, then verifies. Throws webtb::PurgeError when verification fails.
  virtual void purge_state() = 0;

  /// Result value of a page-context expression.
  virtual nlohmann::json evaluate(const std::string& expression) = 0;
  virtual std::string title() { return evaluate("document.title").get<std::string>(); }
  virtual std::vector<std::string> cookie_names() = 0;
  virtual std::vector<std::string> service_worker_scopes() = 0;

  /// Network events are delivered on the driver's reader thread.
  virtual int subscribe(cdp::EventHandler handler) = 0;
  virtual void unsubscribe(int token) = 0;
};

class CdpBrowserDriver final : public BrowserDriver {
 public:
  explicit CdpBrowserDriver(LaunchSpec spec);
  ~CdpBrowserDriver() override;

  void start() override;
  void stop() override;
  bool running() const override;
  pid_t browser_pid() const override { return pid_; }
  nlohmann::json metadata() const override { return metadata_; }

  NavigationResult navigate(const std::string& url, std::chrono::milliseconds timeout) override;
  void purge_state() override;

  nlohmann::json evaluate(const std::string& expression) override;
  std::vector<std::string> cookie_names() override;
  std::vector<std::string> service_worker_scopes() override;

  int subscribe(cdp::EventHandler handler) override;
  void unsubscribe(int token) override;

  /// Protocol escape hatch for tests.
  cdp::Json call(const std::string& method, cdp::Json params = cdp::Json::object());

 private:
  cdp::Connection& conn() const;

  LaunchSpec spec_;
  pid_t pid_ = 0;
  std::unique_ptr<cdp::Connection> conn_;
  std::string session_;
  nlohmann::json metadata_ = nlohmann::json::object();
  std::mutex origins_mu_;
  std::set<std::string> origins_;
  // Survive restarts: the connection forwards every event here.
  std::mutex handlers_mu_;
  int next_token_ = 1;
  std::map<int, cdp::EventHandler> handlers_;
};

}  // namespace webtb
