#pragma once

// Minimal blocking HTTP and WebSocket clients for exercising the fixture service.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace webtb::test_support {

struct HttpReply {
  int status = 0;
  std::string content_type;
  std::string cache_control;
  std::string body;
  std::int64_t header_bytes = 0;  // status line and header block as read off the wire
  std::int64_t wire_bytes = 0;
};

HttpReply http_request(const std::string& host, unsigned short port, const std::string& method,
                       const std::string& target);

class WsClient {
 public:
  /// Connects and completes the upgrade; throws on failure.
  WsClient(const std::string& host, unsigned short port, const std::string& target);
  ~WsClient();

  void send_text(const std::string& text);
  /// Next text frame, or nullopt when the peer closed.
  std::optional<std::string> read_text();
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace webtb::test_support
