// Stand-in browser for harness tests. Speaks the remote-debugging pipe protocol on
// fds 3 (commands in) and 4 (replies and events out), loads plain-HTTP pages, and runs
// the fixture page roles declared with data-webtb-role.

#include <fmt/format.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>
#include <mutex>

#include <json.hpp>

#include "fetch.hpp"
#include "miner.hpp"
#include "webtb/cdp.hpp"
#include "webtb/network_recorder.hpp"
#include "webtb/url.hpp"

namespace mockbrowser {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kStateKey = "webtb_state";

double now_s() { return webtb::monitors::monotonic_seconds(); }

double wall_s() {
  return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
}

struct CommandError {
  int code;
  std::string message;
};

class Browser {
 public:
  explicit Browser(webtb::cdp::PipeTransport& pipe) : pipe_(pipe) {}

  ~Browser() {
    {
      std::lock_guard lock(mu_);
      ++generation_;
      close_page();
    }
    for (auto& l : loaders_) l.thread.join();
  }

  /// Handles one command; returns false once the browser should exit.
  bool handle(const Json& msg) {
    const int id = msg.value("id", 0);
    const auto method = msg.value("method", std::string{});
    const auto params = msg.value("params", Json::object());
    Json reply{{"id", id}};
    if (msg.contains("sessionId")) reply["sessionId"] = msg["sessionId"];
    if (method == "Page.navigate") {
      navigate(params.value("url", std::string{}), std::move(reply));
      return true;
    }
    bool keep_running = true;
    try {
      std::lock_guard lock(mu_);
      reply["result"] = dispatch(method, params, keep_running);
    } catch (const CommandError& e) {
      reply["error"] = {{"code", e.code}, {"message", e.message}};
    }
    send(reply);
    return keep_running;
  }

 private:
  void send(const Json& j) { pipe_.send(j.dump()); }

  void emit(const std::string& method, Json params) {
    Json ev{{"method", method}, {"params", std::move(params)}};
    if (!session_.empty()) ev["sessionId"] = session_;
    try {
      send(ev);
    } catch (const std::exception&) {
      // Controller went away; the command loop will notice.
    }
  }

  std::string next_request_id() { return fmt::format("mock.{}", ++request_counter_); }

  Json dispatch(const std::string& method, const Json& params, bool& keep_running) {
    if (method == "Browser.getVersion") {
      return {{"protocolVersion", "1.3"},
              {"product", "webtb-mock-browser/1.0"},
              {"userAgent", "webtb-mock-browser"},
              {"jsVersion", ""}};
    }
    if (method == "Browser.close") {
      ++generation_;
      close_page();
      keep_running = false;
      return Json::object();
    }
    if (method == "Target.getTargets") {
      return {{"targetInfos", Json::array({{{"targetId", "page-1"}, {"type", "page"}, {"url", url_}}})}};
    }
    if (method == "Target.createTarget") return {{"targetId", "page-1"}};
    if (method == "Target.attachToTarget") {
      session_ = "session-1";
      return {{"sessionId", session_}};
    }
    if (method == "Page.enable" || method == "Network.enable" || method == "Runtime.enable" ||
        method == "Page.disable" || method == "Network.disable" || method == "Runtime.disable" ||
        method == "ServiceWorker.disable") {
      return Json::object();
    }
    if (method == "Runtime.evaluate") return evaluate(params.value("expression", std::string{}));
    if (method == "Network.getAllCookies") {
      auto cookies = Json::array();
      for (const auto& [origin, jar] : cookies_) {
        for (const auto& [name, value] : jar) {
          cookies.push_back({{"name", name}, {"value", value}, {"domain", webtb::url_host(origin)}, {"path", "/"}});
        }
      }
      return {{"cookies", cookies}};
    }
    if (method == "Network.clearBrowserCookies") {
      cookies_.clear();
      return Json::object();
    }
    if (method == "Network.clearBrowserCache") {
      cache_.clear();
      return Json::object();
    }
    if (method == "Storage.clearDataForOrigin") {
      const auto origin = params.value("origin", std::string{});
      const auto types = params.value("storageTypes", std::string{"all"});
      const auto has = [&](const char* t) { return types == "all" || types.find(t) != std::string::npos; };
      if (has("cookies")) cookies_.erase(origin);
      if (has("local_storage")) local_storage_.erase(origin);
      if (has("service_workers")) service_workers_.erase(origin);
      return Json::object();
    }
    if (method == "ServiceWorker.enable") {
      auto regs = Json::array();
      for (const auto& [origin, scope] : service_workers_) {
        regs.push_back({{"registrationId", origin}, {"scopeURL", scope}, {"isDeleted", false}});
      }
      emit("ServiceWorker.workerRegistrationUpdated", {{"registrations", regs}});
      return Json::object();
    }
    throw CommandError{-32601, "'" + method + "' wasn't found"};
  }

  void close_page() {
    if (miner_) {
      miner_->stop();
      miner_.reset();
    }
  }

  /// Emits the request lifecycle for one resource; returns the fetch (nullopt on cache
  /// hit). Called without the state lock; the fetch itself runs unlocked.
  std::optional<FetchResult> load_resource(const std::string& url, const std::string& type,
                                           const std::string& initiator, std::uint64_t generation) {
    std::string rid;
    {
      std::lock_guard lock(mu_);
      rid = next_request_id();
      emit("Network.requestWillBeSent", {{"requestId", rid},
                                         {"loaderId", "loader-1"},
                                         {"documentURL", url_},
                                         {"request", {{"url", url}, {"method", "GET"}}},
                                         {"timestamp", now_s()},
                                         {"wallTime", wall_s()},
                                         {"initiator", {{"type", initiator}}},
                                         {"type", type}});
      if (const auto hit = cache_.find(url); hit != cache_.end() && Clock::now() < hit->second) {
        emit("Network.responseReceived",
             {{"requestId", rid},
              {"timestamp", now_s()},
              {"type", type},
              {"response", {{"url", url}, {"status", 200}, {"fromDiskCache", true}}}});
        emit("Network.loadingFinished", {{"requestId", rid}, {"timestamp", now_s()}, {"encodedDataLength", 0}});
        return std::nullopt;
      }
    }
    auto res = http_get(url);
    std::lock_guard lock(mu_);
    if (generation != generation_) {
      res.ok = false;
      res.error = "net::ERR_ABORTED";
      return res;
    }
    if (!res.ok) {
      emit("Network.loadingFailed",
           {{"requestId", rid}, {"timestamp", now_s()}, {"type", type}, {"errorText", res.error}});
      return res;
    }
    emit("Network.responseReceived",
         {{"requestId", rid},
          {"timestamp", now_s()},
          {"type", type},
          {"response", {{"url", url}, {"status", res.status}, {"mimeType", res.content_type}, {"fromDiskCache", false}}}});
    emit("Network.dataReceived", {{"requestId", rid},
                                  {"timestamp", now_s()},
                                  {"dataLength", res.body.size()},
                                  {"encodedDataLength", res.wire_bytes}});
    emit("Network.loadingFinished", {{"requestId", rid}, {"timestamp", now_s()}, {"encodedDataLength", res.wire_bytes}});
    if (res.max_age_s && *res.max_age_s > 0 && res.status == 200) {
      cache_[url] = Clock::now() + std::chrono::seconds(*res.max_age_s);
    }
    if (const auto sc = res.headers.find("set-cookie"); sc != res.headers.end()) {
      const auto pair = sc->second.substr(0, sc->second.find(';'));
      const auto eq = pair.find('=');
      if (eq != std::string::npos) cookies_[webtb::url_origin(url)][pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return res;
  }

  // A new navigation supersedes a pending one, whose reply then carries net::ERR_ABORTED.
  // The reply is sent once the document response is in, as a real browser commits.
  void navigate(const std::string& url, Json reply) {
    const Json frame{{"frameId", "frame-1"}, {"loaderId", "loader-1"}};
    std::uint64_t generation = 0;
    {
      std::lock_guard lock(mu_);
      generation = ++generation_;
      close_page();
      if (url == "about:blank") {
        url_ = url;
        title_.clear();
        reply["result"] = frame;
        send(reply);
        emit("Page.loadEventFired", {{"timestamp", now_s()}});
        return;
      }
    }
    reap_loaders();
    auto done = std::make_shared<std::atomic<bool>>(false);
    loaders_.push_back({std::thread([this, url, reply, frame, generation, done]() mutable {
                          load_document(url, std::move(reply), frame, generation);
                          done->store(true);
                        }),
                        done});
  }

  void load_document(const std::string& url, Json reply, const Json& frame, std::uint64_t generation) {
    const auto doc = load_resource(url, "Document", "other", generation);
    std::string html;
    {
      std::lock_guard lock(mu_);
      if (generation != generation_) {
        reply["result"] = {{"frameId", "frame-1"}, {"errorText", "net::ERR_ABORTED"}};
        send(reply);
        return;
      }
      if (doc && !doc->ok) {
        reply["result"] = {{"frameId", "frame-1"}, {"errorText", doc->error}};
        send(reply);
        return;
      }
      url_ = url;
      // Documents are never cacheable here, so a miss always carries the markup.
      html = doc ? doc->body : std::string{};
      title_ = html_title(html);
      reply["result"] = frame;
      send(reply);
    }
    load_page(html, generation);
  }

  bool current(std::uint64_t generation) {
    std::lock_guard lock(mu_);
    return generation == generation_;
  }

  void load_page(const std::string& html, std::uint64_t generation) {
    const auto tags = scan_tags(html, {"script", "img", "link"});
    std::string base;
    {
      std::lock_guard lock(mu_);
      base = url_;
    }
    for (const auto& tag : tags) {
      std::string src;
      std::string type;
      if (tag.name == "script") {
        src = tag.attr("src");
        type = "Script";
      } else if (tag.name == "img") {
        src = tag.attr("src");
        type = "Image";
      } else if (webtb::to_lower(tag.attr("rel")) == "stylesheet") {
        src = tag.attr("href");
        type = "Stylesheet";
      }
      if (!src.empty()) load_resource(webtb::resolve_url(base, src), type, "parser", generation);
      if (!current(generation)) return;
    }
    for (const auto& tag : tags) {
      if (tag.attr("data-webtb-role") == "state-test") run_state_test(tag, base, generation);
    }
    std::lock_guard lock(mu_);
    if (generation != generation_) return;
    emit("Page.domContentEventFired", {{"timestamp", now_s()}});
    emit("Page.loadEventFired", {{"timestamp", now_s()}});
    for (const auto& tag : tags) {
      if (tag.attr("data-webtb-role") == "miner") start_miner(tag);
    }
  }

  void run_state_test(const Tag& tag, const std::string& base, std::uint64_t generation) {
    const auto origin = webtb::url_origin(base);
    {
      std::lock_guard lock(mu_);
      if (generation != generation_) return;
      std::vector<std::string> found;
      if (cookies_[origin].contains(kStateKey)) found.push_back("cookie");
      if (local_storage_[origin].contains(kStateKey)) found.push_back("storage");
      if (service_workers_.contains(origin)) found.push_back("sw");
      std::string list;
      for (const auto& f : found) list += (list.empty() ? "" : ",") + f;
      title_ = "found:" + (found.empty() ? std::string("none") : list);
      cookies_[origin][kStateKey] = "1";
      local_storage_[origin][kStateKey] = "1";
    }
    const auto sw = tag.attr("data-sw");
    if (sw.empty()) return;
    load_resource(webtb::resolve_url(base, sw), "Script", "script", generation);
    std::lock_guard lock(mu_);
    if (generation == generation_) service_workers_[origin] = origin + "/";
  }

  void reap_loaders() {
    for (auto it = loaders_.begin(); it != loaders_.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = loaders_.erase(it);
      } else {
        ++it;
      }
    }
  }

  static double number_attr(const Tag& tag, const std::string& key, double fallback) {
    const auto v = tag.attr(key);
    if (v.empty()) return fallback;
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      return fallback;
    }
  }

  void start_miner(const Tag& tag) {
    MinerParams p;
    auto ws = webtb::resolve_url(url_, tag.attr("data-ws", "/msp/pow"));
    if (ws.starts_with("http://")) ws = "ws://" + ws.substr(7);
    p.ws_url = ws;
    p.workers = static_cast<int>(number_attr(tag, "data-workers", 1));
    p.throttle = number_attr(tag, "data-throttle", 0.0);
    p.interval_s = number_attr(tag, "data-interval", 1.0);
    p.frame_size = static_cast<std::int64_t>(number_attr(tag, "data-frame-size", 0));
    p.hashes_per_share = static_cast<std::int64_t>(number_attr(tag, "data-hashes-per-share", 0));
    if (p.workers < 0 || !(p.throttle >= 0.0 && p.throttle <= 1.0) || !(p.interval_s > 0.0)) return;
    miner_ = std::make_unique<MinerRuntime>(
        p, [this](const std::string& m, Json params) { emit(m, std::move(params)); }, next_request_id());
    miner_->start();
  }

  Json evaluate(const std::string& expression) {
    auto wrap = [](const Json& value) {
      const char* type = value.is_string()   ? "string"
                         : value.is_number() ? "number"
                         : value.is_boolean() ? "boolean"
                         : value.is_null()    ? "undefined"
                                              : "object";
      Json r{{"type", type}};
      if (!value.is_null()) r["value"] = value;
      return Json{{"result", r}};
    };
    if (expression == "document.title") return wrap(title_);
    if (expression == "location.href") return wrap(url_);
    if (expression == "window.__webtbMiner") return wrap(miner_ ? miner_->stats() : Json());
    return {{"result", {{"type", "object"}, {"subtype", "error"}}},
            {"exceptionDetails", {{"text", "unsupported expression"}}}};
  }

  struct Loader {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  webtb::cdp::PipeTransport& pipe_;
  // Guards everything below except loaders_, which only the command thread touches.
  std::mutex mu_;
  std::uint64_t generation_ = 0;
  std::vector<Loader> loaders_;
  std::string session_;
  std::uint64_t request_counter_ = 0;
  std::string url_ = "about:blank";
  std::string title_;
  std::map<std::string, std::map<std::string, std::string>> cookies_;        // origin -> name -> value
  std::map<std::string, std::map<std::string, std::string>> local_storage_;  // origin -> key -> value
  std::map<std::string, std::string> service_workers_;                        // origin -> scope
  std::map<std::string, Clock::time_point> cache_;                            // url -> expiry
  std::unique_ptr<MinerRuntime> miner_;
};

}  // namespace
}  // namespace mockbrowser

int main() {
  webtb::cdp::PipeTransport pipe(3, 4);
  mockbrowser::Browser browser(pipe);
  while (auto msg = pipe.receive()) {
    const auto j = nlohmann::json::parse(*msg, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      std::cerr << "webtb-mock-browser: ignoring malformed command\n";
      continue;
    }
    if (!browser.handle(j)) break;
  }
  return 0;
}
