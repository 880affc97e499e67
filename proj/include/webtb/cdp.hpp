#pragma once

// Remote-debugging protocol client: NUL-delimited JSON messages over a pair of
// local sockets (the browser reads commands on fd 3 and writes replies/events on fd 4).

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace webtb::cdp {

using Json = nlohmann::json;

/// Message framing over file descriptors. Owns both descriptors.
class PipeTransport {
 public:
  PipeTransport(int read_fd, int write_fd);
  ~PipeTransport();
  PipeTransport(const PipeTransport&) = delete;
  PipeTransport& operator=(const PipeTransport&) = delete;

  /// Throws std::runtime_error when the peer is gone.
  void send(const std::string& message);
  /// Blocks for the next message; nullopt on end of stream.
  std::optional<std::string> receive();
  /// Unblocks a pending receive() from another thread.
  void shutdown();

 private:
  int read_fd_;
  int write_fd_;
  std::mutex write_mu_;
  std::string buffer_;
};

using EventHandler = std::function<void(const std::string& method, const Json& params)>;

class Connection {
 public:
  explicit Connection(std::unique_ptr<PipeTransport> transport);
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  /// Sends a command and waits for its reply. Throws webtb::DriverCrashed when the
  /// connection drops and webtb::DriverError on an error reply or timeout.
  Json call(const std::string& method, Json params = Json::object(), const std::string& session_id = {},
            std::chrono::milliseconds timeout = std::chrono::seconds(30));

  /// Handlers run on the reader thread, one event at a time.
  int subscribe(EventHandler handler);
  void unsubscribe(int token);

  bool connected() const { return connected_.load(); }
  void close();

 private:
  void read_loop();

  std::unique_ptr<PipeTransport> transport_;
  std::atomic<bool> connected_{true};
  std::mutex mu_;
  int next_id_ = 1;
  std::map<int, std::promise<Json>> pending_;
  std::mutex handlers_mu_;
  int next_token_ = 1;
  std::map<int, EventHandler> handlers_;
  std::thread reader_;
};

/// Collects events matching a method name from the moment it is constructed.
class EventWaiter {
 public:
  EventWaiter(Connection& conn, std::string method);
  ~EventWaiter();
  EventWaiter(const EventWaiter&) = delete;
  EventWaiter& operator=(const EventWaiter&) = delete;

  /// Next matching event, or nullopt after `timeout`.
  std::optional<Json> wait(std::chrono::milliseconds timeout);
  std::vector<Json> drain();

 private:
  Connection& conn_;
  std::string method_;
  int token_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Json> events_;
};

}  // namespace webtb::cdp
