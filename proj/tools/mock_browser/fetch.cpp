#include "fetch.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>

#include "webtb/url.hpp"

namespace mockbrowser {

namespace beast = boost::beast;
namespace http = beast::http;
namespace net = boost::asio;
using tcp = net::ip::tcp;

FetchResult http_get(const std::string& url, std::chrono::seconds timeout) {
  FetchResult out;
  if (!url.starts_with("http://")) {
    out.error = "net::ERR_UNKNOWN_URL_SCHEME";
    return out;
  }
  const auto host = webtb::url_host(url);
  if (host.empty()) {
    out.error = "net::ERR_INVALID_URL";
    return out;
  }
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  beast::error_code ec;
  tcp::resolver resolver(ioc);
  const auto endpoints = resolver.resolve(host, std::to_string(webtb::url_port(url)), ec);
  if (ec) {
    out.error = "net::ERR_NAME_NOT_RESOLVED";
    return out;
  }
  stream.expires_after(timeout);
  stream.connect(endpoints, ec);
  if (ec) {
    out.error = ec == net::error::connection_refused ? "net::ERR_CONNECTION_REFUSED"
                : ec == beast::error::timeout        ? "net::ERR_CONNECTION_TIMED_OUT"
                                                     : "net::ERR_CONNECTION_FAILED";
    return out;
  }

  http::request<http::empty_body> req{http::verb::get, webtb::url_target(url), 11};
  req.set(http::field::host, host);
  req.set(http::field::user_agent, "webtb-mock-browser");
  http::write(stream, req, ec);
  if (ec) {
    out.error = "net::ERR_CONNECTION_RESET";
    return out;
  }

  beast::flat_buffer buffer;
  http::response_parser<http::string_body> parser;
  parser.body_limit(64 * 1024 * 1024);
  const auto n = http::read(stream, buffer, parser, ec);
  if (ec) {
    out.error = ec == beast::error::timeout ? "net::ERR_TIMED_OUT" : "net::ERR_EMPTY_RESPONSE";
    return out;
  }
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);

  auto res = parser.release();
  out.ok = true;
  out.status = static_cast<int>(res.result_int());
  out.wire_bytes = static_cast<std::int64_t>(n);
  for (const auto& f : res) out.headers[webtb::to_lower(std::string(f.name_string()))] = std::string(f.value());
  out.content_type = out.headers["content-type"];
  if (const auto cc = out.headers.find("cache-control"); cc != out.headers.end()) {
    const auto pos = cc->second.find("max-age=");
    if (pos != std::string::npos) {
      try {
        out.max_age_s = std::stoi(cc->second.substr(pos + 8));
      } catch (const std::exception&) {
      }
    }
  }
  out.body = std::move(res.body());
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::map<std::string, std::string> parse_attrs(std::string_view s) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (is_space(s[i]) || s[i] == '/')) ++i;
    const auto name_start = i;
    while (i < s.size() && !is_space(s[i]) && s[i] != '=' && s[i] != '/') ++i;
    if (i == name_start) break;
    const auto name = webtb::to_lower(s.substr(name_start, i - name_start));
    std::string value;
    while (i < s.size() && is_space(s[i])) ++i;
    if (i < s.size() && s[i] == '=') {
      ++i;
      while (i < s.size() && is_space(s[i])) ++i;
      if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
        const char q = s[i++];
        const auto end = s.find(q, i);
        value = std::string(s.substr(i, end - i));
        i = end == std::string_view::npos ? s.size() : end + 1;
      } else {
        const auto start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        value = std::string(s.substr(start, i - start));
      }
    }
    attrs[name] = value;
  }
  return attrs;
}

}  // namespace

std::vector<Tag> scan_tags(const std::string& html, const std::vector<std::string>& names) {
  std::vector<Tag> tags;
  const auto lower = webtb::to_lower(html);
  std::size_t pos = 0;
  while ((pos = lower.find('<', pos)) != std::string::npos) {
    if (lower.compare(pos, 4, "<!--") == 0) {
      const auto end = lower.find("-->", pos + 4);
      if (end == std::string::npos) break;
      pos = end + 3;
      continue;
    }
    const auto close = lower.find('>', pos);
    if (close == std::string::npos) break;
    std::size_t name_end = pos + 1;
    while (name_end < close && !is_space(lower[name_end]) && lower[name_end] != '/') ++name_end;
    const auto name = lower.substr(pos + 1, name_end - pos - 1);
    for (const auto& wanted : names) {
      if (name == wanted) {
        tags.push_back({name, parse_attrs(std::string_view(html).substr(name_end, close - name_end))});
        break;
      }
    }
    pos = close + 1;
  }
  return tags;
}

std::string html_title(const std::string& html) {
  const auto lower = webtb::to_lower(html);
  const auto open = lower.find("<title>");
  if (open == std::string::npos) return {};
  const auto close = lower.find("</title>", open);
  if (close == std::string::npos) return {};
  return std::string(webtb::trim(html.substr(open + 7, close - open - 7)));
}

}  // namespace mockbrowser
