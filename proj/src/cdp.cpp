#include "webtb/cdp.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <stdexcept>

#include "webtb/error.hpp"

namespace webtb::cdp {

PipeTransport::PipeTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

PipeTransport::~PipeTransport() {
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

void PipeTransport::send(const std::string& message) {
  std::lock_guard lock(write_mu_);
  std::string frame = message;
  frame.push_back('\0');
  std::size_t off = 0;
  while (off < frame.size()) {
    const auto n = ::send(write_fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("remote-debugging channel closed");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> PipeTransport::receive() {
  for (;;) {
    if (const auto nul = buffer_.find('\0'); nul != std::string::npos) {
      std::string msg = buffer_.substr(0, nul);
      buffer_.erase(0, nul + 1);
      return msg;
    }
    char chunk[65536];
    const auto n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void PipeTransport::shutdown() {
  ::shutdown(read_fd_, SHUT_RDWR);
  ::shutdown(write_fd_, SHUT_RDWR);
}

Connection::Connection(std::unique_ptr<PipeTransport> transport)
    : transport_(std::move(transport)), reader_([this] { read_loop(); }) {}

Connection::~Connection() { close(); }

void Connection::close() {
  if (transport_) transport_->shutdown();
  if (reader_.joinable()) reader_.join();
}

void Connection::read_loop() {
  while (auto msg = transport_->receive()) {
    Json j;
    try {
      j = Json::parse(*msg);
    } catch (const Json::parse_error&) {
      continue;
    }
    if (j.contains("id")) {
      std::lock_guard lock(mu_);
      const auto it = pending_.find(j["id"].get<int>());
      if (it != pending_.end()) {
        it->second.set_value(std::move(j));
        pending_.erase(it);
      }
    } else if (j.contains("method")) {
      std::vector<EventHandler> handlers;
      {
        std::lock_guard lock(handlers_mu_);
        for (const auto& [_, h] : handlers_) handlers.push_back(h);
      }
      const auto method = j["method"].get<std::string>();
      const auto& params = j.contains("params") ? j["params"] : Json::object();
      for (const auto& h : handlers) h(method, params);
    }
  }
  connected_ = false;
  std::lock_guard lock(mu_);
  for (auto& [_, p] : pending_) {
    p.set_exception(std::make_exception_ptr(DriverCrashed("browser connection lost")));
  }
  pending_.clear();
}

Json Connection::call(const std::string& method, Json params, const std::string& session_id,
                      std::chrono::milliseconds timeout) {
  std::future<Json> reply;
  int id = 0;
  {
    std::lock_guard lock(mu_);
    if (!connected_) throw DriverCrashed("browser connection lost");
    id = next_id_++;
    reply = pending_[id].get_future();
  }
  Json msg{{"id", id}, {"method", method}, {"params", std::move(params)}};
  if (!session_id.empty()) msg["sessionId"] = session_id;
  try {
    transport_->send(msg.dump());
  } catch (const std::runtime_error&) {
    std::lock_guard lock(mu_);
    pending_.erase(id);
    throw DriverCrashed("browser connection lost while sending " + method);
  }
  if (reply.wait_for(timeout) != std::future_status::ready) {
    std::lock_guard lock(mu_);
    pending_.erase(id);
    throw DriverTimeout(method + " timed out");
  }
  auto j = reply.get();
  if (j.contains("error")) {
    throw DriverError(method + ": " + j["error"].value("message", std::string("error")));
  }
  return j.value("result", Json::object());
}

int Connection::subscribe(EventHandler handler) {
  std::lock_guard lock(handlers_mu_);
  const int token = next_token_++;
  handlers_[token] = std::move(handler);
  return token;
}

void Connection::unsubscribe(int token) {
  std::lock_guard lock(handlers_mu_);
  handlers_.erase(token);
}

EventWaiter::EventWaiter(Connection& conn, std::string method) : conn_(conn), method_(std::move(method)) {
  token_ = conn_.subscribe([this](const std::string& m, const Json& params) {
    if (m != method_) return;
    {
      std::lock_guard lock(mu_);
      events_.push_back(params);
    }
    cv_.notify_all();
  });
}

EventWaiter::~EventWaiter() { conn_.unsubscribe(token_); }

std::optional<Json> EventWaiter::wait(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return !events_.empty() || !conn_.connected(); })) return std::nullopt;
  if (events_.empty()) return std::nullopt;
  auto j = std::move(events_.front());
  events_.pop_front();
  return j;
}

std::vector<Json> EventWaiter::drain() {
  std::lock_guard lock(mu_);
  std::vector<Json> out(events_.begin(), events_.end());
  events_.clear();
  return out;
}

}  // namespace webtb::cdp
