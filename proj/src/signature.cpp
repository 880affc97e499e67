#include "webtb/signature.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "webtb/error.hpp"
#include "webtb/url.hpp"

namespace webtb::detect {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool looks_like_ip(std::string_view token) {
  if (token.find(':') != std::string_view::npos) return true;  // IPv6
  int dots = 0;
  for (char c : token) {
    if (c == '.') {
      ++dots;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return dots == 3;
}

bool is_hostname(std::string_view s) {
  if (s.empty() || s.find('.') == std::string_view::npos) return false;
  if (s.front() == '.' || s.back() == '.' || s.front() == '-') return false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '.' || c == '-' || c == '_')) return false;
  }
  if (s.find("..") != std::string_view::npos) return false;
  return true;
}

bool has_file_extension(std::string_view s) {
  static constexpr std::string_view kExts[] = {".js", ".wasm", ".php", ".html", ".htm",
                                               ".css", ".json", ".mjs", ".asm"};
  return std::any_of(std::begin(kExts), std::end(kExts),
                     [&](std::string_view e) { return s.ends_with(e); });
}

PatternKind infer_kind(std::string_view pattern) {
  if (pattern.find("://") != std::string_view::npos) return PatternKind::url_substring;
  if (pattern.find_first_of("/?=&") != std::string_view::npos) return PatternKind::url_substring;
  if (is_hostname(pattern) && !has_file_extension(pattern)) return PatternKind::domain;
  return PatternKind::keyword;
}

bool is_reserved_host(std::string_view h) {
  return h == "localhost" || h == "localhost.localdomain" || h == "broadcasthost" ||
         h == "local" || h == "ip6-localhost" || h == "ip6-loopback" || looks_like_ip(h);
}

void parse_hosts_line(std::string_view line, Category category, std::vector<SignatureEntry>& out) {
  auto tokens = split_ws(line);
  std::size_t first = looks_like_ip(tokens.front()) ? 1 : 0;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    if (tokens[i].starts_with("#")) break;
    const auto host = to_lower(tokens[i]);
    if (is_reserved_host(host)) continue;
    out.push_back(make_entry(host, PatternKind::domain, category, host));
  }
}

void parse_plain_line(std::string_view line, Category category, std::vector<SignatureEntry>& out) {
  auto tokens = split_ws(line);
  const auto pattern = to_lower(tokens.front());
  std::optional<std::string> label;
  if (tokens.size() > 1 && !tokens[1].starts_with("#")) label = to_lower(tokens[1]);
  const auto kind = infer_kind(pattern);
  if (!label && kind == PatternKind::domain) label = pattern;
  out.push_back(make_entry(pattern, kind, category, std::move(label)));
}

void parse_filter_line(std::string_view line, Category category, std::vector<SignatureEntry>& out) {
  if (line.starts_with("[")) return;                             // "[Adblock Plus 2.0]"
  if (line.starts_with("@@")) return;                            // exception rules allow, never block
  if (line.find("##") != std::string_view::npos ||               // element hiding
      line.find("#@#") != std::string_view::npos ||
      line.find("#?#") != std::string_view::npos) {
    return;
  }
  // Regex rules may contain '$' themselves, so test before stripping options.
  const auto is_regex = [](std::string_view s) { return s.size() > 1 && s.front() == '/' && s.back() == '/'; };
  if (is_regex(line)) return;
  if (const auto dollar = line.rfind('$'); dollar != std::string_view::npos && dollar > 0) {
    line = line.substr(0, dollar);
  }
  if (is_regex(line)) return;

  std::string body = to_lower(line);
  bool anchored_domain = false;
  if (body.starts_with("||")) {
    body.erase(0, 2);
    anchored_domain = true;
  } else if (body.starts_with("|")) {
    body.erase(0, 1);
  }
  if (body.ends_with("|")) body.pop_back();
  while (!body.empty() && (body.back() == '^' || body.back() == '*')) body.pop_back();
  while (!body.empty() && body.front() == '*') body.erase(0, 1);
  if (body.empty()) return;
  if (body.find('*') != std::string::npos) return;  // inner wildcards are not literal patterns
  // A "^" separator inside the body only delimits the host; keep the literal text around it.
  std::erase(body, '^');

  if (anchored_domain && is_hostname(body)) {
    out.push_back(make_entry(body, PatternKind::domain, category, body));
    return;
  }
  const auto kind = infer_kind(body);
  std::optional<std::string> label;
  if (kind == PatternKind::domain) label = body;
  out.push_back(make_entry(body, kind, category, std::move(label)));
}

std::vector<SignatureEntry> normalize(std::vector<SignatureEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.key() != b.key()) return a.key() < b.key();
    // Entries with a label sort before unlabeled ones, smallest label first.
    if (a.library_label.has_value() != b.library_label.has_value()) return a.library_label.has_value();
    return a.library_label < b.library_label;
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const auto& a, const auto& b) { return a.key() == b.key(); }),
                entries.end());
  return entries;
}

std::vector<std::string> normalize_names(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace

std::string_view to_string(PatternKind k) {
  switch (k) {
    case PatternKind::domain: return "domain";
    case PatternKind::url_substring: return "url_substring";
    case PatternKind::keyword: return "keyword";
  }
  return "?";
}

std::string_view to_string(Category c) { return c == Category::miner ? "miner" : "ad"; }

std::string_view to_string(ListFormat f) {
  switch (f) {
    case ListFormat::hosts_file: return "hosts_file";
    case ListFormat::plain_lines: return "plain_lines";
    case ListFormat::filter_rules: return "filter_rules";
  }
  return "?";
}

PatternKind parse_pattern_kind(std::string_view s) {
  if (s == "domain") return PatternKind::domain;
  if (s == "url_substring") return PatternKind::url_substring;
  if (s == "keyword") return PatternKind::keyword;
  throw std::invalid_argument("unknown pattern kind: " + std::string(s));
}

Category parse_category(std::string_view s) {
  if (s == "miner") return Category::miner;
  if (s == "ad") return Category::ad;
  throw std::invalid_argument("unknown category: " + std::string(s));
}

ListFormat parse_list_format(std::string_view s) {
  if (s == "hosts_file" || s == "hosts") return ListFormat::hosts_file;
  if (s == "plain_lines" || s == "plain") return ListFormat::plain_lines;
  if (s == "filter_rules" || s == "filter") return ListFormat::filter_rules;
  throw std::invalid_argument("unknown list format: " + std::string(s));
}

SignatureEntry make_entry(std::string_view pattern, PatternKind kind, Category category,
                          std::optional<std::string> label) {
  auto p = to_lower(trim(pattern));
  if (p.empty()) throw std::invalid_argument("signature pattern must not be empty");
  if (kind == PatternKind::domain &&
      (p.find("://") != std::string::npos || p.find('/') != std::string::npos ||
       p.find_first_of(" \t") != std::string::npos)) {
    throw std::invalid_argument("domain pattern carries a scheme or path: " + p);
  }
  if (label) {
    *label = std::string(trim(*label));
    if (label->empty()) label.reset();
  }
  return SignatureEntry{std::move(p), kind, std::move(label), category};
}

Blacklist::Blacklist(std::vector<SignatureEntry> entries, std::vector<std::string> source_names)
    : entries_(normalize(std::move(entries))), source_names_(normalize_names(std::move(source_names))) {}

std::vector<SignatureEntry> Blacklist::of_category(Category c) const {
  std::vector<SignatureEntry> out;
  std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
               [c](const auto& e) { return e.category == c; });
  return out;
}

std::vector<SignatureEntry> parse_blacklist(std::string_view raw_text, ListFormat format,
                                            Category category) {
  std::vector<SignatureEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= raw_text.size()) {
    const auto nl = raw_text.find('\n', pos);
    auto line = raw_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? raw_text.size() + 1 : nl + 1;
    ++line_no;
    if (!is_valid_utf8(line)) throw ParseError(line_no, "invalid UTF-8");
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == '!') continue;
    try {
      switch (format) {
        case ListFormat::hosts_file: parse_hosts_line(line, category, out); break;
        case ListFormat::plain_lines: parse_plain_line(line, category, out); break;
        case ListFormat::filter_rules: parse_filter_line(line, category, out); break;
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

Blacklist merge_blacklists(const std::vector<Blacklist>& lists) {
  std::vector<SignatureEntry> all;
  std::vector<std::string> names;
  for (const auto& l : lists) {
    all.insert(all.end(), l.entries().begin(), l.entries().end());
    names.insert(names.end(), l.source_names().begin(), l.source_names().end());
  }
  return Blacklist(std::move(all), std::move(names));
}

ListFormat sniff_format(std::string_view raw_text) {
  std::istringstream in{std::string(raw_text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '!') {
      if (t.starts_with("[Adblock") || t.starts_with("! Title")) return ListFormat::filter_rules;
      continue;
    }
    if (t.starts_with("||") || t.starts_with("|") || t.starts_with("@@") ||
        t.find("##") != std::string_view::npos || t.starts_with("[")) {
      return ListFormat::filter_rules;
    }
    auto tokens = split_ws(t);
    if (tokens.size() >= 2 && looks_like_ip(tokens.front())) return ListFormat::hosts_file;
    return ListFormat::plain_lines;
  }
  return ListFormat::plain_lines;
}

Blacklist load_blacklist(const std::string& path, ListFormat format, Category category) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open blacklist: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  try {
    return Blacklist(parse_blacklist(text, format, category),
                     {std::filesystem::path(path).filename().string()});
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

}  // namespace webtb::detect
