#include "miner.hpp"

#include <sys/socket.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstring>

#include "webtb/digest.hpp"
#include "webtb/network_recorder.hpp"
#include "webtb/pow_protocol.hpp"
#include "webtb/url.hpp"

namespace mockbrowser {
namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

constexpr auto kSlice = std::chrono::milliseconds(100);
constexpr std::size_t kScratchpadBytes = 2 * 1024 * 1024;

double now_s() { return webtb::monitors::monotonic_seconds(); }

}  // namespace

MinerRuntime::MinerRuntime(MinerParams params, EmitFn emit, std::string request_id)
    : params_(std::move(params)), emit_(std::move(emit)), request_id_(std::move(request_id)) {}

MinerRuntime::~MinerRuntime() { stop(); }

void MinerRuntime::start() {
  started_ = Clock::now();
  for (int i = 0; i < params_.workers; ++i) workers_.emplace_back([this, i] { work(i); });
  reporter_ = std::thread([this] { report(); });
}

void MinerRuntime::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (const int fd = socket_fd_.load(); fd >= 0) ::shutdown(fd, SHUT_RDWR);
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  if (reporter_.joinable()) reporter_.join();
}

nlohmann::json MinerRuntime::stats() const {
  return {{"hashes", hashes_.load()},
          {"hashes_reported", hashes_reported_.load()},
          {"elapsed_s", std::chrono::duration<double>(Clock::now() - started_).count()},
          {"shares_sent", shares_sent_.load()},
          {"jobs_received", jobs_received_.load()},
          {"errors_received", errors_received_.load()},
          {"reconnects", reconnects_.load()},
          {"workers", params_.workers},
          {"throttle", params_.throttle},
          {"running", !stopping_.load()}};
}

bool MinerRuntime::wait_until(Clock::time_point t) {
  std::unique_lock lock(mu_);
  return !cv_.wait_until(lock, t, [&] { return stopping_.load(); });
}

void MinerRuntime::work(int index) {
  // Per-thread scratchpad, as memory-hard miners keep one per worker.
  std::vector<unsigned char> scratchpad(kScratchpadBytes);
  std::memset(scratchpad.data(), index + 1, scratchpad.size());
  webtb::DigestSpinner spinner(static_cast<std::uint64_t>(index) + 101);
  const auto busy = std::chrono::duration_cast<Clock::duration>(kSlice * (1.0 - params_.throttle));
  auto slice_start = Clock::now();
  while (!stopping_) {
    const auto busy_until = slice_start + busy;
    constexpr std::uint64_t kBatch = 64;
    while (Clock::now() < busy_until && !stopping_) {
      spinner.spin(kBatch);
      hashes_.fetch_add(kBatch, std::memory_order_relaxed);
    }
    slice_start += kSlice;
    if (!wait_until(slice_start)) break;
    // Resynchronise after an overrun (descheduled thread) instead of bursting.
    if (Clock::now() - slice_start > kSlice) slice_start = Clock::now();
  }
}

void MinerRuntime::report() {
  auto backoff = std::chrono::milliseconds(500);
  while (!stopping_) {
    const bool clean = session();
    if (stopping_) break;
    reconnects_.fetch_add(1);
    if (!wait_until(Clock::now() + backoff)) break;
    backoff = clean ? std::chrono::milliseconds(500) : std::min(backoff * 2, std::chrono::milliseconds(8000));
  }
}

bool MinerRuntime::session() {
  const auto ws_url = params_.ws_url;
  emit_("Network.webSocketCreated", {{"requestId", request_id_}, {"url", ws_url}, {"initiator", {{"type", "script"}}}});

  net::io_context ioc;
  websocket::stream<tcp::socket> ws(ioc);
  beast::error_code ec;
  tcp::resolver resolver(ioc);
  const auto host = webtb::url_host(ws_url);
  const auto port = webtb::url_port(ws_url);
  const auto endpoints = resolver.resolve(host, std::to_string(port), ec);
  if (!ec) net::connect(ws.next_layer(), endpoints, ec);
  if (!ec) {
    socket_fd_ = ws.next_layer().native_handle();
    if (stopping_) ::shutdown(socket_fd_, SHUT_RDWR);
    ws.handshake(fmt::format("{}:{}", host, port), webtb::url_target(ws_url), ec);
  }
  auto closed = [&](const std::string& reason) {
    socket_fd_ = -1;
    emit_("Network.webSocketClosed", {{"requestId", request_id_}, {"timestamp", now_s()}, {"reason", reason}});
    return false;
  };
  if (ec) return closed("connect failed: " + ec.message());
  emit_("Network.webSocketHandshakeResponseReceived",
        {{"requestId", request_id_}, {"timestamp", now_s()}, {"response", {{"status", 101}}}});
  ws.text(true);

  auto emit_frame = [&](const char* method, const std::string& payload, bool mask) {
    emit_(method, {{"requestId", request_id_},
                   {"timestamp", now_s()},
                   {"response", {{"opcode", 1}, {"mask", mask}, {"payloadData", payload}}}});
  };
  std::string current_job;
  auto read_reply = [&]() {
    beast::flat_buffer buf;
    ws.read(buf, ec);
    if (ec) return false;
    const auto text = beast::buffers_to_string(buf.data());
    emit_frame("Network.webSocketFrameReceived", text, false);
    if (const auto job = webtb::fixture::decode_job(text)) {
      current_job = job->job_id;
      jobs_received_.fetch_add(1);
    } else {
      errors_received_.fetch_add(1);
    }
    return true;
  };

  if (!read_reply()) return closed("read failed: " + ec.message());

  std::uint64_t nonce = 0;
  auto next_share_at = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                          std::chrono::duration<double>(params_.interval_s));
  while (!stopping_) {
    std::int64_t claimed = 0;
    if (params_.hashes_per_share > 0) {
      while (!stopping_ && hashes_.load() - hashes_reported_.load() < params_.hashes_per_share) {
        if (!wait_until(Clock::now() + std::chrono::milliseconds(5))) break;
      }
      claimed = params_.hashes_per_share;
    } else {
      if (!wait_until(next_share_at)) break;
      next_share_at += std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(params_.interval_s));
      claimed = hashes_.load() - hashes_reported_.load();
      if (claimed <= 0) continue;
    }
    if (stopping_) break;
    const auto share = webtb::fixture::encode_share(
        {current_job, fmt::format("{:08x}", ++nonce), claimed}, static_cast<std::size_t>(params_.frame_size));
    ws.write(net::buffer(share), ec);
    if (ec) return closed("write failed: " + ec.message());
    hashes_reported_.fetch_add(claimed);
    shares_sent_.fetch_add(1);
    emit_frame("Network.webSocketFrameSent", share, true);
    if (!read_reply()) return closed("read failed: " + ec.message());
  }
  socket_fd_ = -1;
  ws.next_layer().close(ec);
  emit_("Network.webSocketClosed", {{"requestId", request_id_}, {"timestamp", now_s()}, {"reason", "page closed"}});
  return true;
}

}  // namespace mockbrowser
