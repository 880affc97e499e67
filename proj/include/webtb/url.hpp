#pragma once

#include <map>
#include <string>
#include <string_view>

namespace webtb {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Lowercased host of an absolute URL ("http://A.b:80/x" -> "a.b"); empty when absent.
std::string url_host(std::string_view url);

/// "scheme://host[:port]" of an absolute URL; empty when the URL has no authority.
std::string url_origin(std::string_view url);

/// Path plus query ("/x?y"); "/" when empty.
std::string url_target(std::string_view url);

/// Port of an http(s)/ws(s) URL, defaulting by scheme.
unsigned url_port(std::string_view url);

/// True when `host` equals `domain` or is a subdomain of it.
bool host_matches_domain(std::string_view host, std::string_view domain);

/// Resolve a reference found in a page against the page URL.
std::string resolve_url(std::string_view base, std::string_view ref);

bool is_valid_utf8(std::string_view s);

/// Key/value pairs of the query part of a URL or request target. No percent-decoding;
/// a repeated key keeps its last value.
std::map<std::string, std::string> query_params(std::string_view url_or_target);

/// Target without its query string.
std::string_view target_path(std::string_view target);

}  // namespace webtb
