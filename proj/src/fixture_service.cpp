#include "webtb/fixture_service.hpp"

#include <sys/socket.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <cmath>
#include <fmt/format.h>
#include <list>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "webtb/pow_protocol.hpp"
#include "webtb/url.hpp"

namespace webtb::fixture {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Response = http::response<http::string_body>;

constexpr int kCacheSeconds = 3600;

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument("bad value for " + key + ": " + text);
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("bad value for " + key + ": " + text);
  }
  return v;
}

void validate_miner(const MinerPageParams& m) {
  if (m.workers < 0) throw std::invalid_argument("workers must be >= 0");
  if (!(m.throttle >= 0.0 && m.throttle <= 1.0)) throw std::invalid_argument("throttle must lie in [0, 1]");
  if (!(m.share_interval_s > 0.0)) throw std::invalid_argument("share interval must be > 0");
  if (m.hashes_per_share < 0 || m.frame_size < 0 || m.job_size < 0) {
    throw std::invalid_argument("miner sizes and counts must be >= 0");
  }
}

void validate_ads(const AdPageParams& a) {
  if (a.slot_count < 0 || a.resource_size < 0) throw std::invalid_argument("ad slot count and size must be >= 0");
}

Response make_response(http::status status, const std::string& content_type, std::string body, bool cacheable) {
  Response res{status, 11};
  res.set(http::field::content_type, content_type);
  if (cacheable) res.set(http::field::cache_control, fmt::format("max-age={}", kCacheSeconds));
  res.keep_alive(true);
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

/// Pads markup to exactly `size` bytes with a comment before "</body>".
std::string sized_html(const std::string& head, const std::string& body, std::int64_t size) {
  const std::string open = "<!doctype html><html><head>" + head + "</head><body>" + body;
  const std::string close = "</body></html>";
  std::string html = open + close;
  const auto comment_overhead = static_cast<std::int64_t>(std::string("<!---->").size());
  const auto missing = size - static_cast<std::int64_t>(html.size());
  if (missing >= comment_overhead) {
    html = open + "<!--" + std::string(static_cast<std::size_t>(missing - comment_overhead), '.') + "-->" + close;
  }
  return html;
}

std::string filler(std::int64_t size, char c) { return std::string(static_cast<std::size_t>(std::max<std::int64_t>(size, 0)), c); }

std::string css_asset(std::int64_t size) {
  std::string css = "body{margin:0}";
  if (static_cast<std::int64_t>(css.size()) + 4 <= size) {
    css += "/*" + filler(size - static_cast<std::int64_t>(css.size()) - 4, '.') + "*/";
  }
  return css;
}

}  // namespace

void validate(const FixtureConfig& config) {
  validate_miner(config.miner);
  validate_ads(config.ads);
  if (config.control_size < 0 || config.asset_size < 0) throw std::invalid_argument("page sizes must be >= 0");
}

FixtureConfig fixture_config_from_json(const nlohmann::json& j) {
  FixtureConfig c;
  if (!j.is_object()) throw std::invalid_argument("fixture config must be a JSON object");
  if (j.contains("miner")) {
    const auto& m = j["miner"];
    c.miner.workers = m.value("workers", c.miner.workers);
    c.miner.throttle = m.value("throttle", c.miner.throttle);
    c.miner.share_interval_s = m.value("share_interval_s", c.miner.share_interval_s);
    c.miner.hashes_per_share = m.value("hashes_per_share", c.miner.hashes_per_share);
    c.miner.frame_size = m.value("frame_size", c.miner.frame_size);
    c.miner.job_size = m.value("job_size", c.miner.job_size);
  }
  if (j.contains("ads")) {
    c.ads.slot_count = j["ads"].value("slot_count", c.ads.slot_count);
    c.ads.resource_size = j["ads"].value("resource_size", c.ads.resource_size);
  }
  c.control_size = j.value("control_size", c.control_size);
  c.asset_size = j.value("asset_size", c.asset_size);
  c.bind_address = j.value("bind_address", c.bind_address);
  c.port = j.value("port", c.port);
  validate(c);
  return c;
}

MinerPageParams miner_params_from_query(const std::string& target, MinerPageParams m) {
  for (const auto& [k, v] : query_params(target)) {
    if (k == "workers") m.workers = static_cast<int>(parse_int(k, v));
    else if (k == "throttle") m.throttle = parse_real(k, v);
    else if (k == "interval") m.share_interval_s = parse_real(k, v);
    else if (k == "frame_size") m.frame_size = parse_int(k, v);
    else if (k == "hps") m.hashes_per_share = parse_int(k, v);
    else if (k == "job_size") m.job_size = parse_int(k, v);
  }
  validate_miner(m);
  return m;
}

AdPageParams ad_params_from_query(const std::string& target, AdPageParams a) {
  for (const auto& [k, v] : query_params(target)) {
    if (k == "slots") a.slot_count = static_cast<int>(parse_int(k, v));
    else if (k == "size") a.resource_size = parse_int(k, v);
  }
  validate_ads(a);
  return a;
}

SessionLedger LedgerSnapshot::totals() const {
  SessionLedger t;
  for (const auto& s : sessions) {
    t.accepted += s.accepted;
    t.rejected += s.rejected;
    t.claimed_hashes += s.claimed_hashes;
    t.frames_received += s.frames_received;
    t.frames_sent += s.frames_sent;
    t.bytes_received += s.bytes_received;
    t.bytes_sent += s.bytes_sent;
    t.open = t.open || s.open;
  }
  return t;
}

namespace {

nlohmann::json session_json(const SessionLedger& s) {
  return {{"id", s.id},
          {"accepted", s.accepted},
          {"rejected", s.rejected},
          {"claimed_hashes", s.claimed_hashes},
          {"frames_received", s.frames_received},
          {"frames_sent", s.frames_sent},
          {"bytes_received", s.bytes_received},
          {"bytes_sent", s.bytes_sent},
          {"open", s.open}};
}

SessionLedger session_from_json(const nlohmann::json& j) {
  SessionLedger s;
  s.id = j.value("id", 0);
  s.accepted = j.value("accepted", std::int64_t{0});
  s.rejected = j.value("rejected", std::int64_t{0});
  s.claimed_hashes = j.value("claimed_hashes", std::int64_t{0});
  s.frames_received = j.value("frames_received", std::int64_t{0});
  s.frames_sent = j.value("frames_sent", std::int64_t{0});
  s.bytes_received = j.value("bytes_received", std::int64_t{0});
  s.bytes_sent = j.value("bytes_sent", std::int64_t{0});
  s.open = j.value("open", false);
  return s;
}

}  // namespace

nlohmann::json LedgerSnapshot::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& s : sessions) arr.push_back(session_json(s));
  auto totals_json = session_json(totals());
  totals_json.erase("id");
  return {{"sessions", arr}, {"totals", totals_json}};
}

LedgerSnapshot LedgerSnapshot::from_json(const nlohmann::json& j) {
  LedgerSnapshot out;
  for (const auto& s : j.at("sessions")) out.sessions.push_back(session_from_json(s));
  return out;
}

double revenue_crosscheck(const LedgerSnapshot& ledger, const profit::MiningRateModel& rates,
                          std::int64_t hashes_per_share) {
  if (hashes_per_share < 0) throw std::domain_error("hashes per share must be >= 0");
  if (!(rates.payout_per_mhash >= 0.0) || !(rates.coin_price >= 0.0)) throw std::domain_error("rates must be >= 0");
  const double hashes = static_cast<double>(ledger.totals().accepted) * static_cast<double>(hashes_per_share);
  return hashes / 1e6 * rates.payout_per_mhash * rates.coin_price;
}

std::int64_t response_header_bytes(const std::string& content_type, std::int64_t body_size, bool cacheable) {
  auto res = make_response(http::status::ok, content_type, filler(body_size, ' '), cacheable);
  std::ostringstream os;
  os << res.base();
  return static_cast<std::int64_t>(os.str().size());
}

detect::Blacklist fixture_blacklist() {
  using detect::Category;
  using detect::PatternKind;
  return detect::Blacklist({detect::make_entry("/msp/", PatternKind::url_substring, Category::miner, "fixture-msp"),
                            detect::make_entry("/adsrv/", PatternKind::url_substring, Category::ad, "fixture-ads")},
                           {"fixture"});
}

struct FixtureService::Impl {
  struct Connection {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  FixtureConfig cfg;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::thread accept_thread;
  std::atomic<bool> stopping{false};

  std::mutex conn_mu;
  std::list<Connection> connections;
  std::set<int> open_fds;

  mutable std::mutex ledger_mu;
  std::vector<SessionLedger> sessions;
  int next_session = 1;
  std::uint64_t job_counter = 0;

  explicit Impl(FixtureConfig c) : cfg(std::move(c)) {}

  void accept_loop() {
    for (;;) {
      tcp::socket sock{ioc};
      beast::error_code ec;
      acceptor.accept(sock, ec);
      if (stopping) break;
      if (ec) continue;
      std::lock_guard lock(conn_mu);
      for (auto it = connections.begin(); it != connections.end();) {
        if (*it->done) {
          it->thread.join();
          it = connections.erase(it);
        } else {
          ++it;
        }
      }
      const int fd = sock.native_handle();
      open_fds.insert(fd);
      auto done = std::make_shared<std::atomic<bool>>(false);
      connections.push_back({std::thread([this, s = std::move(sock), done, fd]() mutable {
                               serve(std::move(s));
                               {
                                 std::lock_guard l(conn_mu);
                                 open_fds.erase(fd);
                               }
                               *done = true;
                             }),
                             done});
    }
  }

  void shutdown() {
    if (stopping.exchange(true)) return;
    ::shutdown(acceptor.native_handle(), SHUT_RDWR);
    if (accept_thread.joinable()) accept_thread.join();
    std::list<Connection> conns;
    {
      std::lock_guard lock(conn_mu);
      for (int fd : open_fds) ::shutdown(fd, SHUT_RDWR);
      conns.swap(connections);
    }
    for (auto& c : conns) c.thread.join();
    beast::error_code ec;
    acceptor.close(ec);
  }

  void serve(tcp::socket sock) {
    beast::flat_buffer buf;
    beast::error_code ec;
    for (;;) {
      http::request<http::string_body> req;
      http::read(sock, buf, req, ec);
      if (ec) break;
      if (websocket::is_upgrade(req)) {
        if (target_path(std::string(req.target())) == "/msp/pow") {
          pow_session(std::move(sock), req);
          return;
        }
        auto res = make_response(http::status::not_found, "text/plain", "not found", false);
        http::write(sock, res, ec);
        break;
      }
      auto res = route(req);
      http::write(sock, res, ec);
      if (ec || !req.keep_alive()) break;
    }
    sock.shutdown(tcp::socket::shutdown_both, ec);
  }

  Response route(const http::request<http::string_body>& req) {
    const std::string target(req.target());
    const std::string path(target_path(target));
    try {
      if (req.method() == http::verb::post && path == "/ledger/reset") {
        reset_ledger();
        return make_response(http::status::ok, "application/json", "{}", false);
      }
      if (req.method() != http::verb::get) {
        return make_response(http::status::method_not_allowed, "text/plain", "method not allowed", false);
      }
      if (path == "/" || path == "/index.html") return page_index();
      if (path == "/control") return page_control();
      if (path == "/ads") return page_ads(target);
      if (path == "/miner") return page_miner(target);
      if (path == "/state-test") return page_state_test();
      if (path == "/ledger") return make_response(http::status::ok, "application/json", snapshot().to_json().dump(), false);
      if (path == "/static/style.css") return make_response(http::status::ok, "text/css", css_asset(cfg.asset_size), true);
      if (path == "/static/state.js" || path == "/static/sw.js" || path == "/msp/miner.js") {
        return make_response(http::status::ok, "application/javascript", "// behaviour supplied by the page runtime\n", true);
      }
      if (path.starts_with("/adsrv/slot")) {
        const auto size = ad_params_from_query(target, cfg.ads).resource_size;
        return make_response(http::status::ok, "image/gif", filler(size, 'a'), false);
      }
    } catch (const std::invalid_argument& e) {
      return make_response(http::status::bad_request, "text/plain", e.what(), false);
    }
    return make_response(http::status::not_found, "text/plain", "not found", false);
  }

  Response page_index() const {
    return make_response(http::status::ok, "text/html",
                         sized_html("<title>fixtures</title>",
                                    "<a href=\"/control\">control</a> <a href=\"/ads\">ads</a> "
                                    "<a href=\"/miner\">miner</a> <a href=\"/state-test\">state-test</a>",
                                    0),
                         false);
  }

  Response page_control() const {
    return make_response(http::status::ok, "text/html",
                         sized_html("<title>control</title><link rel=\"stylesheet\" href=\"/static/style.css\">",
                                    "<p>control</p>", cfg.control_size),
                         false);
  }

  Response page_ads(const std::string& target) const {
    const auto a = ad_params_from_query(target, cfg.ads);
    std::string slots;
    for (int k = 1; k <= a.slot_count; ++k) {
      slots += fmt::format("<img src=\"/adsrv/slot{}?size={}\" width=\"300\" height=\"250\">", k, a.resource_size);
    }
    return make_response(http::status::ok, "text/html", sized_html("<title>ads</title>", slots, 0), false);
  }

  Response page_miner(const std::string& target) const {
    const auto m = miner_params_from_query(target, cfg.miner);
    const auto script = fmt::format(
        "<script src=\"/msp/miner.js\" data-webtb-role=\"miner\" data-ws=\"/msp/pow?job_size={}\" "
        "data-workers=\"{}\" data-throttle=\"{}\" data-interval=\"{}\" data-frame-size=\"{}\" "
        "data-hashes-per-share=\"{}\"></script>",
        m.job_size, m.workers, m.throttle, m.share_interval_s, m.frame_size, m.hashes_per_share);
    return make_response(http::status::ok, "text/html", sized_html("<title>miner</title>" + script, "<p>mining</p>", 0),
                         false);
  }

  Response page_state_test() const {
    return make_response(
        http::status::ok, "text/html",
        sized_html("<title>state-test</title><script src=\"/static/state.js\" data-webtb-role=\"state-test\" "
                   "data-sw=\"/static/sw.js\"></script>",
                   "<p>state</p>", 0),
        false);
  }

  PowJob next_job() {
    std::lock_guard lock(ledger_mu);
    const auto n = ++job_counter;
    return PowJob{fmt::format("j{:08d}", n), fmt::format("{:016x}", n * 0x9e3779b97f4a7c15ULL), 255};
  }

  template <typename F>
  void update(int sid, F&& f) {
    std::lock_guard lock(ledger_mu);
    for (auto& s : sessions) {
      if (s.id == sid) {
        f(s);
        return;
      }
    }
  }

  void pow_session(tcp::socket sock, const http::request<http::string_body>& req) {
    websocket::stream<tcp::socket> ws(std::move(sock));
    beast::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);

    std::size_t job_size = static_cast<std::size_t>(cfg.miner.job_size);
    if (const auto q = query_params(std::string(req.target())); q.contains("job_size")) {
      try {
        job_size = static_cast<std::size_t>(std::max<std::int64_t>(0, parse_int("job_size", q.at("job_size"))));
      } catch (const std::invalid_argument&) {
      }
    }

    int sid = 0;
    {
      std::lock_guard lock(ledger_mu);
      sid = next_session++;
      SessionLedger s;
      s.id = sid;
      s.open = true;
      sessions.push_back(s);
    }

    std::string current_job;
    auto send = [&](const std::string& text) {
      ws.write(net::buffer(text), ec);
      if (!ec) {
        update(sid, [&](SessionLedger& s) {
          ++s.frames_sent;
          s.bytes_sent += static_cast<std::int64_t>(text.size());
        });
      }
    };
    auto send_job = [&] {
      const auto job = next_job();
      current_job = job.job_id;
      send(encode_job(job, job_size));
    };

    send_job();
    while (!ec) {
      beast::flat_buffer b;
      ws.read(b, ec);
      if (ec) break;
      const auto msg = beast::buffers_to_string(b.data());
      const auto share = decode_share(msg);
      const bool valid = share && share->job_id == current_job;
      update(sid, [&](SessionLedger& s) {
        ++s.frames_received;
        s.bytes_received += static_cast<std::int64_t>(msg.size());
        if (valid) {
          ++s.accepted;
          s.claimed_hashes += share->hash_count_claimed;
        } else {
          ++s.rejected;
        }
      });
      if (!share) {
        send(encode_error("malformed share", ""));
      } else if (!valid) {
        send(encode_error("unknown job", share->job_id));
      } else {
        send_job();
      }
    }
    update(sid, [](SessionLedger& s) { s.open = false; });
  }

  LedgerSnapshot snapshot() const {
    std::lock_guard lock(ledger_mu);
    return LedgerSnapshot{sessions};
  }

  void reset_ledger() {
    std::lock_guard lock(ledger_mu);
    std::erase_if(sessions, [](const SessionLedger& s) { return !s.open; });
    for (auto& s : sessions) s = SessionLedger{s.id, 0, 0, 0, 0, 0, 0, 0, true};
  }
};

FixtureService::FixtureService(FixtureConfig config) : config_(std::move(config)) {
  validate(config_);
  impl_ = std::make_unique<Impl>(config_);
  beast::error_code ec;
  const tcp::endpoint ep(net::ip::make_address(config_.bind_address, ec), config_.port);
  if (ec) throw std::runtime_error("bad bind address " + config_.bind_address);
  impl_->acceptor.open(ep.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(ep, ec);
  if (!ec) impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("cannot listen on {}:{}: {}", config_.bind_address, config_.port, ec.message()));
  }
  port_ = impl_->acceptor.local_endpoint().port();
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

FixtureService::~FixtureService() { stop(); }

void FixtureService::stop() {
  if (impl_) impl_->shutdown();
}

std::string FixtureService::base_url() const { return fmt::format("http://{}:{}", config_.bind_address, port_); }

LedgerSnapshot FixtureService::ledger() const { return impl_->snapshot(); }

void FixtureService::reset_ledger() { impl_->reset_ledger(); }

}  // namespace webtb::fixture
