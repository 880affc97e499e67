#pragma once

// Blacklist signatures: parsing the common list shapes and merging them.

#include <compare>
#include <optional>
#include <tuple>
#include <string>
#include <string_view>
#include <vector>

namespace webtb::detect {

enum class PatternKind { domain, url_substring, keyword };
enum class Category { miner, ad };

enum class ListFormat {
  hosts_file,    // "0.0.0.0 host [host...]"
  plain_lines,   // one pattern per line, optional library label as second field
  filter_rules,  // adblock-style network rules ("||host^", "/path/", "|http://...")
};

std::string_view to_string(PatternKind k);
std::string_view to_string(Category c);
std::string_view to_string(ListFormat f);
PatternKind parse_pattern_kind(std::string_view s);
Category parse_category(std::string_view s);
ListFormat parse_list_format(std::string_view s);

struct SignatureEntry {
  std::string pattern;  // lowercase, trimmed, never empty
  PatternKind kind = PatternKind::keyword;
  std::optional<std::string> library_label;
  Category category = Category::miner;

  /// Identity key; the label is an attribute, not part of identity.
  auto key() const { return std::tie(category, kind, pattern); }

  /// Label used for attribution: explicit label, else the pattern itself.
  const std::string& attribution() const { return library_label ? *library_label : pattern; }

  friend bool operator==(const SignatureEntry&, const SignatureEntry&) = default;
};

/// Builds an entry, normalizing the pattern and enforcing the entry invariants.
/// Throws std::invalid_argument when the pattern is empty or a domain carries a scheme/path.
SignatureEntry make_entry(std::string_view pattern, PatternKind kind, Category category,
                          std::optional<std::string> label = std::nullopt);

/// Immutable set of entries, unique under (pattern, kind, category), kept sorted by that key.
class Blacklist {
 public:
  Blacklist() = default;
  Blacklist(std::vector<SignatureEntry> entries, std::vector<std::string> source_names);

  const std::vector<SignatureEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& source_names() const noexcept { return source_names_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<SignatureEntry> of_category(Category c) const;

  friend bool operator==(const Blacklist&, const Blacklist&) = default;

 private:
  std::vector<SignatureEntry> entries_;
  std::vector<std::string> source_names_;
};

/// One entry per meaningful line; comments (# or !) and blanks skipped.
/// Throws webtb::ParseError on bytes that are not valid UTF-8.
std::vector<SignatureEntry> parse_blacklist(std::string_view raw_text, ListFormat format,
                                            Category category);

/// Set union. Duplicate keys keep the lexicographically smallest non-empty label,
/// which keeps the operation commutative and associative.
Blacklist merge_blacklists(const std::vector<Blacklist>& lists);

/// Reads a list file; the file name becomes the source name.
Blacklist load_blacklist(const std::string& path, ListFormat format, Category category);

/// Guesses the format from content: hosts lines start with an IP, filter rules use
/// "||", "|", "@@" or "##" syntax, anything else is plain lines.
ListFormat sniff_format(std::string_view raw_text);

}  // namespace webtb::detect
