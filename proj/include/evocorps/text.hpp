#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evocorps {

// Sorted, de-duplicated set of lowercase alphanumeric tokens; punctuation is
// a separator and is dropped.
using TokenSet = std::vector<std::string>;

TokenSet tokenize(std::string_view text);

// Normalizes a free-form tag list with the same rules as tokenize().
TokenSet normalize_tags(const std::vector<std::string>& tags);

// tokenize() minus a short English stopword list; used to derive topic tags
// from headlines.
TokenSet topic_tokens(std::string_view text);

// |a ∩ b| / |a ∪ b|; both inputs must be sorted sets. Two empty sets give 0.
double jaccard(const TokenSet& a, const TokenSet& b);

TokenSet set_union(const TokenSet& a, const TokenSet& b);

std::string sha256_hex(std::string_view data);

std::string to_lower(std::string_view s);

// Word list, one entry per line, '#' comments allowed. Entries are lowercased.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> words);
  static Lexicon load(const std::filesystem::path& path);

  // Number of tokens of `text` that are lexicon entries (with multiplicity).
  std::size_t hits(std::string_view text) const;
  bool any_hit(std::string_view text) const { return hits(text) > 0; }
  bool empty() const { return words_.empty(); }

 private:
  TokenSet words_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace evocorps
