#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rocc/errors.hpp"

namespace rocc {

// A single lowercased term. Never empty, never contains whitespace or
// separator characters.
using Token = std::string;

// Unique terms of a text, in lexicographic iteration order.
using TermSet = std::set<Token>;

struct TokenizerConfig {
  bool lowercase = true;
  std::unordered_set<Token> stopwords;  // matched after case folding
  std::size_t min_token_len = 1;        // in code points

  void validate() const {
    if (min_token_len < 1) throw ConfigError("min_token_len must be >= 1");
  }
};

namespace detail {

// Decodes the UTF-8 code point starting at s[i] and advances i. A malformed
// byte is consumed alone and returned as its own value, so no input can
// stall the scan.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t j) { return static_cast<unsigned char>(s[j]); };
  const unsigned char b0 = byte(i);
  std::size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (std::size_t j = 1; j < len; ++j) {
    const unsigned char bj = byte(i + j);
    if ((bj & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bj & 0x3F);
  }
  i += len;
  return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Word constituents: ASCII alphanumerics plus every non-ASCII code point.
// Everything else splits.
inline bool is_word_cp(char32_t cp) {
  if (cp < 128) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  return true;
}

// ASCII and Latin-1 case folding; other scripts pass through unchanged.
inline char32_t fold_cp(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

}  // namespace detail

// Splits on whitespace and punctuation, folds case, drops stopwords and
// too-short tokens. Deterministic; preserves input order.
inline std::vector<Token> tokenize(std::string_view text,
                                   const TokenizerConfig& cfg = {}) {
  std::vector<Token> tokens;
  Token current;
  std::size_t current_cps = 0;
  const auto flush = [&] {
    if (!current.empty() && current_cps >= cfg.min_token_len &&
        !cfg.stopwords.count(current)) {
      tokens.push_back(std::move(current));
    }
    current.clear();
    current_cps = 0;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = detail::next_code_point(text, i);
    if (detail::is_word_cp(cp)) {
      detail::append_utf8(current, cfg.lowercase ? detail::fold_cp(cp) : cp);
      ++current_cps;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline TermSet term_set(const std::vector<Token>& tokens) {
  return TermSet(tokens.begin(), tokens.end());
}

// Document-level statistics where each sentence is one document.
struct CorpusStats {
  std::size_t n_docs = 0;
  std::unordered_map<Token, std::size_t> doc_freq;
  double avg_len = 0.0;

  std::size_t doc_freq_of(const Token& term) const {
    const auto it = doc_freq.find(term);
    return it == doc_freq.end() ? 0 : it->second;
  }
};

// Anything that can hand out an inverse document frequency per term. The
// production implementation is CorpusStats; tests may substitute fixed
// tables.
template <class Stats>
concept StatsLike = requires(const Stats& s, const Token& t) {
  { s.avg_len } -> std::convertible_to<double>;
  { idf(t, s) } -> std::convertible_to<double>;
};

// doc_freq counts sentences containing the term at least once; avg_len is
// the mean token count. Throws on an empty or all-empty corpus.
template <class SentenceRange>
CorpusStats build_stats(const SentenceRange& sentences) {
  CorpusStats stats;
  std::size_t total_tokens = 0;
  for (const auto& sent : sentences) {
    ++stats.n_docs;
    total_tokens += sent.len;
    for (const Token& term : sent.terms) ++stats.doc_freq[term];
  }
  if (stats.n_docs == 0) throw DataError("build_stats: empty corpus");
  if (total_tokens == 0) throw DataError("build_stats: corpus has no tokens");
  stats.avg_len = static_cast<double>(total_tokens) /
                  static_cast<double>(stats.n_docs);
  return stats;
}

// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), with df = 0 for unseen
// terms. Strictly positive for df in [0, N] and decreasing in df.
inline double idf(const Token& term, const CorpusStats& stats) {
  const double df = static_cast<double>(stats.doc_freq_of(term));
  const double n = static_cast<double>(stats.n_docs);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

// One term per line, UTF-8. Entries are case-folded when `lowercase` so they
// match post-tokenization terms.
inline std::unordered_set<Token> load_stopwords(
    const std::filesystem::path& path, bool lowercase = true) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path.string());
  std::unordered_set<Token> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Token folded;
    std::size_t i = 0;
    while (i < line.size()) {
      const char32_t cp = detail::next_code_point(line, i);
      detail::append_utf8(folded, lowercase ? detail::fold_cp(cp) : cp);
    }
    words.insert(std::move(folded));
  }
  return words;
}

}  // namespace rocc
