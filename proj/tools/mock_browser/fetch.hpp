#pragma once

// Plain-HTTP fetching and the tag scan the stand-in browser needs to load fixture pages.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mockbrowser {

struct FetchResult {
  bool ok = false;
  std::string error;  // browser-style net::ERR_* code when !ok
  int status = 0;
  std::string content_type;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
  std::int64_t wire_bytes = 0;  // status line + headers + body as received
  std::optional<int> max_age_s;
};

/// GET over a fresh connection.
FetchResult http_get(const std::string& url, std::chrono::seconds timeout = std::chrono::seconds(10));

struct Tag {
  std::string name;  // lowercase
  std::map<std::string, std::string> attrs;

  std::string attr(const std::string& key, const std::string& fallback = {}) const {
    const auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second;
  }
};

/// Opening tags of the given names, in document order.
std::vector<Tag> scan_tags(const std::string& html, const std::vector<std::string>& names);
std::string html_title(const std::string& html);

}  // namespace mockbrowser
