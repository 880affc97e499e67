#include "webtb/url.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

namespace webtb {
namespace {

struct Authority {
  std::string_view scheme;
  std::string_view authority;
  std::string_view rest;
};

bool split_url(std::string_view url, Authority& out) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) return false;
  out.scheme = url.substr(0, sep);
  auto after = url.substr(sep + 3);
  const auto end = after.find_first_of("/?#");
  out.authority = after.substr(0, end);
  out.rest = end == std::string_view::npos ? std::string_view{} : after.substr(end);
  if (const auto at = out.authority.rfind('@'); at != std::string_view::npos) {
    out.authority.remove_prefix(at + 1);
  }
  return true;
}

std::string_view host_part(std::string_view authority) {
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    return authority.substr(0, close == std::string_view::npos ? authority.size() : close + 1);
  }
  return authority.substr(0, authority.find(':'));
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string url_host(std::string_view url) {
  Authority a;
  if (!split_url(url, a)) return {};
  return to_lower(host_part(a.authority));
}

std::string url_origin(std::string_view url) {
  Authority a;
  if (!split_url(url, a) || a.authority.empty()) return {};
  return to_lower(a.scheme) + "://" + to_lower(a.authority);
}

std::string url_target(std::string_view url) {
  Authority a;
  if (!split_url(url, a)) return "/";
  auto rest = a.rest.substr(0, a.rest.find('#'));
  if (rest.empty()) return "/";
  if (rest.front() == '?') return "/" + std::string(rest);
  return std::string(rest);
}

unsigned url_port(std::string_view url) {
  Authority a;
  if (!split_url(url, a)) return 0;
  const auto host = host_part(a.authority);
  auto tail = a.authority.substr(host.size());
  if (!tail.empty() && tail.front() == ':') {
    unsigned port = 0;
    for (char c : tail.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return 0;
      port = port * 10 + static_cast<unsigned>(c - '0');
    }
    return port;
  }
  const auto scheme = to_lower(a.scheme);
  if (scheme == "https" || scheme == "wss") return 443;
  return 80;
}

bool host_matches_domain(std::string_view host, std::string_view domain) {
  if (domain.empty() || host.size() < domain.size()) return false;
  if (host == domain) return true;
  return host.ends_with(domain) && host[host.size() - domain.size() - 1] == '.';
}

std::string resolve_url(std::string_view base, std::string_view ref) {
  if (ref.find("://") != std::string_view::npos) return std::string(ref);
  const auto origin = url_origin(base);
  if (ref.starts_with("//")) {
    const auto sep = base.find("://");
    return std::string(base.substr(0, sep + 1)) + std::string(ref);
  }
  if (ref.starts_with("/")) return origin + std::string(ref);
  auto path = url_target(base);
  path = path.substr(0, path.find('?'));
  path = path.substr(0, path.rfind('/') + 1);
  return origin + path + std::string(ref);
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out-of-range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::map<std::string, std::string> query_params(std::string_view url_or_target) {
  std::map<std::string, std::string> out;
  const auto q = url_or_target.find('?');
  if (q == std::string_view::npos) return out;
  auto rest = url_or_target.substr(q + 1);
  if (const auto frag = rest.find('#'); frag != std::string_view::npos) rest = rest.substr(0, frag);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      out[std::string(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : std::string(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return out;
}

std::string_view target_path(std::string_view target) { return target.substr(0, target.find('?')); }

}  // namespace webtb
