#include "webtb/browser_driver.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <thread>

#include "webtb/error.hpp"
#include "webtb/proc.hpp"
#include "webtb/url.hpp"

extern char** environ;

namespace webtb {
namespace {

constexpr auto kCallTimeout = std::chrono::seconds(30);
constexpr const char* kProfileArg = "--user-data-dir=";

// Keeps the child's ends away from fds 0-4 so the dup2 onto 3/4 always clears CLOEXEC.
int high_fd(int fd) {
  const int moved = ::fcntl(fd, F_DUPFD_CLOEXEC, 10);
  ::close(fd);
  if (moved < 0) throw std::runtime_error("fcntl(F_DUPFD_CLOEXEC) failed");
  return moved;
}

std::pair<int, int> socket_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw std::runtime_error("socketpair failed");
  }
  return {high_fd(fds[0]), high_fd(fds[1])};
}

bool reap(pid_t pid, std::chrono::milliseconds within) {
  const auto deadline = std::chrono::steady_clock::now() + within;
  for (;;) {
    int status = 0;
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid || r < 0) return true;
    if (std::chrono::steady_clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

}  // namespace

LaunchSpec chromium_launch(const std::string& executable, std::vector<int> cpu_set) {
  LaunchSpec spec;
  spec.executable = executable;
  spec.args = {"--headless=new",
               "--remote-debugging-pipe",
               "--no-first-run",
               "--no-default-browser-check",
               "--disable-gpu",
               "--disable-extensions",
               "--disable-background-networking",
               "--no-sandbox",
               kProfileArg,
               "about:blank"};
  spec.cpu_set = std::move(cpu_set);
  spec.event_settle = std::chrono::milliseconds(300);
  return spec;
}

LaunchSpec mock_launch(const std::string& executable, std::vector<int> cpu_set) {
  LaunchSpec spec;
  spec.executable = executable;
  spec.cpu_set = std::move(cpu_set);
  spec.discard_stderr = false;
  return spec;
}

std::string find_chromium() {
  if (const char* env = std::getenv("WEBTB_CHROMIUM"); env && *env) return env;
  const char* path = std::getenv("PATH");
  if (!path) return {};
  const std::string dirs = path;
  for (const char* name : {"chromium", "chromium-browser", "google-chrome", "google-chrome-stable", "chrome"}) {
    std::size_t start = 0;
    while (start <= dirs.size()) {
      const auto end = std::min(dirs.find(':', start), dirs.size());
      const auto candidate = std::filesystem::path(dirs.substr(start, end - start)) / name;
      if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
      start = end + 1;
    }
  }
  return {};
}

CdpBrowserDriver::CdpBrowserDriver(LaunchSpec spec) : spec_(std::move(spec)) {}

CdpBrowserDriver::~CdpBrowserDriver() {
  try {
    stop();
  } catch (...) {
  }
}

cdp::Connection& CdpBrowserDriver::conn() const {
  if (!conn_) throw DriverError("browser not started");
  return *conn_;
}

void CdpBrowserDriver::start() {
  if (conn_) stop();

  std::vector<std::string> args{spec_.executable};
  std::string profile_dir;
  for (const auto& a : spec_.args) {
    if (a == kProfileArg) {
      char tmpl[] = "/tmp/webtb-profile-XXXXXX";
      if (!::mkdtemp(tmpl)) throw DriverError("cannot create browser profile directory");
      profile_dir = tmpl;
      args.push_back(a + profile_dir);
    } else {
      args.push_back(a);
    }
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const auto [cmd_parent, cmd_child] = socket_pair();
  const auto [evt_parent, evt_child] = socket_pair();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, cmd_child, 3);
  posix_spawn_file_actions_adddup2(&actions, evt_child, 4);
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  if (spec_.discard_stderr) {
    posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);
  }
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, spec_.executable.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(cmd_child);
  ::close(evt_child);
  if (rc != 0) {
    ::close(cmd_parent);
    ::close(evt_parent);
    throw DriverError("cannot launch " + spec_.executable);
  }
  pid_ = pid;
  proc::set_affinity(pid_, spec_.cpu_set);

  conn_ = std::make_unique<cdp::Connection>(std::make_unique<cdp::PipeTransport>(evt_parent, cmd_parent));
  conn_->subscribe([this](const std::string& method, const cdp::Json& params) {
    if (method == "Network.requestWillBeSent" && params.contains("request")) {
      const auto origin = url_origin(params["request"].value("url", std::string{}));
      if (!origin.empty()) {
        std::lock_guard lock(origins_mu_);
        origins_.insert(origin);
      }
    }
    std::vector<cdp::EventHandler> handlers;
    {
      std::lock_guard lock(handlers_mu_);
      for (const auto& [_, h] : handlers_) handlers.push_back(h);
    }
    for (const auto& h : handlers) h(method, params);
  });

  try {
    metadata_ = conn_->call("Browser.getVersion", cdp::Json::object(), {}, kCallTimeout);
    if (!profile_dir.empty()) metadata_["profile_dir"] = profile_dir;
    metadata_["executable"] = spec_.executable;

    std::string target_id;
    const auto targets = conn_->call("Target.getTargets", cdp::Json::object(), {}, kCallTimeout);
    for (const auto& t : targets.value("targetInfos", cdp::Json::array())) {
      if (t.value("type", std::string{}) == "page") {
        target_id = t.value("targetId", std::string{});
        break;
      }
    }
    if (target_id.empty()) {
      target_id = conn_->call("Target.createTarget", {{"url", "about:blank"}}, {}, kCallTimeout)
                      .value("targetId", std::string{});
    }
    session_ = conn_->call("Target.attachToTarget", {{"targetId", target_id}, {"flatten", true}}, {}, kCallTimeout)
                   .value("sessionId", std::string{});
    for (const char* domain : {"Page.enable", "Network.enable", "Runtime.enable"}) call(domain);
  } catch (...) {
    stop();
    throw;
  }
}

void CdpBrowserDriver::stop() {
  if (conn_ && conn_->connected()) {
    try {
      conn_->call("Browser.close", cdp::Json::object(), {}, std::chrono::seconds(3));
    } catch (const DriverError&) {
    }
  }
  if (pid_ > 0) {
    if (!reap(pid_, std::chrono::seconds(5))) {
      ::kill(pid_, SIGKILL);
      reap(pid_, std::chrono::seconds(5));
    }
    pid_ = 0;
  }
  conn_.reset();
  session_.clear();
  {
    std::lock_guard lock(origins_mu_);
    origins_.clear();
  }
  if (metadata_.contains("profile_dir")) {
    std::error_code ec;
    std::filesystem::remove_all(metadata_["profile_dir"].get<std::string>(), ec);
    metadata_.erase("profile_dir");
  }
}

bool CdpBrowserDriver::running() const { return pid_ > 0 && conn_ && conn_->connected() && proc::alive(pid_); }

cdp::Json CdpBrowserDriver::call(const std::string& method, cdp::Json params) {
  return conn().call(method, std::move(params), session_, kCallTimeout);
}

NavigationResult CdpBrowserDriver::navigate(const std::string& url, std::chrono::milliseconds timeout) {
  NavigationResult out;
  const auto started = std::chrono::steady_clock::now();
  cdp::EventWaiter loaded(conn(), "Page.loadEventFired");
  cdp::Json reply;
  try {
    // The reply waits for the document response, so a silent server surfaces here.
    reply = conn().call("Page.navigate", {{"url", url}}, session_, timeout);
  } catch (const DriverTimeout&) {
    out.error = "navigation timeout";
    return out;
  }
  if (const auto err = reply.value("errorText", std::string{}); !err.empty()) {
    out.error = err;
    return out;
  }
  const auto remaining =
      timeout - std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  if (!loaded.wait(std::max(remaining, std::chrono::milliseconds(0)))) {
    if (!conn().connected()) throw DriverCrashed("browser connection lost during navigation to " + url);
    out.error = "navigation timeout";
    return out;
  }
  out.ok = true;
  out.load_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

void CdpBrowserDriver::purge_state() {
  try {
    const auto blank = navigate("about:blank", std::chrono::seconds(10));
    if (!blank.ok) throw PurgeError("cannot leave the probed page: " + blank.error);
    call("Network.clearBrowserCookies");
    call("Network.clearBrowserCache");
    std::set<std::string> origins;
    {
      std::lock_guard lock(origins_mu_);
      origins.swap(origins_);
    }
    for (const auto& origin : origins) {
      call("Storage.clearDataForOrigin", {{"origin", origin}, {"storageTypes", "all"}});
    }
    if (const auto left = cookie_names(); !left.empty()) {
      throw PurgeError("cookies survived purge: " + left.front());
    }
    if (const auto left = service_worker_scopes(); !left.empty()) {
      throw PurgeError("service worker survived purge: " + left.front());
    }
  } catch (const DriverError& e) {
    throw PurgeError(std::string("purge failed: ") + e.what());
  }
}

nlohmann::json CdpBrowserDriver::evaluate(const std::string& expression) {
  const auto r = call("Runtime.evaluate", {{"expression", expression}, {"returnByValue", true}});
  if (r.contains("exceptionDetails")) throw DriverError("evaluation failed: " + expression);
  return r.value("result", cdp::Json::object()).value("value", cdp::Json());
}

std::vector<std::string> CdpBrowserDriver::cookie_names() {
  std::vector<std::string> names;
  for (const auto& c : call("Network.getAllCookies").value("cookies", cdp::Json::array())) {
    names.push_back(c.value("name", std::string{}));
  }
  return names;
}

std::vector<std::string> CdpBrowserDriver::service_worker_scopes() {
  cdp::EventWaiter updates(conn(), "ServiceWorker.workerRegistrationUpdated");
  call("ServiceWorker.enable");
  if (spec_.event_settle.count() > 0) std::this_thread::sleep_for(spec_.event_settle);
  std::map<std::string, std::pair<std::string, bool>> registrations;  // id -> (scope, deleted)
  for (const auto& ev : updates.drain()) {
    for (const auto& r : ev.value("registrations", cdp::Json::array())) {
      registrations[r.value("registrationId", std::string{})] = {r.value("scopeURL", std::string{}),
                                                                  r.value("isDeleted", false)};
    }
  }
  call("ServiceWorker.disable");
  std::vector<std::string> scopes;
  for (const auto& [_, reg] : registrations) {
    if (!reg.second) scopes.push_back(reg.first);
  }
  return scopes;
}

int CdpBrowserDriver::subscribe(cdp::EventHandler handler) {
  std::lock_guard lock(handlers_mu_);
  const int token = next_token_++;
  handlers_[token] = std::move(handler);
  return token;
}

void CdpBrowserDriver::unsubscribe(int token) {
  std::lock_guard lock(handlers_mu_);
  handlers_.erase(token);
}

}  // namespace webtb
