#include "evocorps/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "evocorps/error.hpp"

namespace evocorps {
namespace {

constexpr std::array<std::string_view, 48> kStopwords = {
    "a",    "an",   "and",  "are",   "as",    "at",    "be",   "been",
    "but",  "by",   "for",  "from",  "has",   "have",  "he",   "her",
    "his",  "in",   "is",   "it",    "its",   "new",   "not",  "of",
    "on",   "or",   "our",  "says",  "she",   "that",  "the",  "their",
    "they", "this", "to",   "was",   "were",  "what",  "when", "which",
    "who",  "will", "with", "would", "after", "about", "over", "into"};

void split_tokens(std::string_view text, std::vector<std::string>& out) {
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
}

void make_set(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

TokenSet tokenize(std::string_view text) {
  TokenSet out;
  split_tokens(text, out);
  make_set(out);
  return out;
}

TokenSet normalize_tags(const std::vector<std::string>& tags) {
  TokenSet out;
  for (const auto& t : tags) split_tokens(t, out);
  make_set(out);
  return out;
}

TokenSet topic_tokens(std::string_view text) {
  TokenSet all = tokenize(text);
  std::erase_if(all, [](const std::string& t) {
    return t.size() < 2 ||
           std::find(kStopwords.begin(), kStopwords.end(), t) != kStopwords.end();
  });
  return all;
}

double jaccard(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

TokenSet set_union(const TokenSet& a, const TokenSet& b) {
  TokenSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

Lexicon::Lexicon(std::vector<std::string> words) {
  for (auto& w : words) words_.push_back(to_lower(w));
  make_set(words_);
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::vector<std::string> toks;
    split_tokens(line, toks);
    for (auto& t : toks) words.push_back(std::move(t));
  }
  return Lexicon(std::move(words));
}

std::size_t Lexicon::hits(std::string_view text) const {
  std::vector<std::string> toks;
  split_tokens(text, toks);
  return static_cast<std::size_t>(std::count_if(
      toks.begin(), toks.end(), [&](const std::string& t) {
        return std::binary_search(words_.begin(), words_.end(), t);
      }));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBackend: return "backend failure";
    case ErrorCode::kIncompleteLog: return "incomplete log";
  }
  return "unknown";
}

}  // namespace evocorps
