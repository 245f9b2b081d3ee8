#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rocc/errors.hpp"
#include "rocc/text.hpp"

namespace rocc {

// A candidate justification sentence. `idx` is the ordinal position in the
// source collection (KB line or passage position).
struct Sentence {
  std::size_t idx = 0;
  std::string text;
  std::vector<Token> tokens;
  TermSet terms;
  std::size_t len = 0;

  static Sentence make(std::size_t idx, std::string text,
                       const TokenizerConfig& cfg = {}) {
    Sentence s;
    s.idx = idx;
    s.tokens = tokenize(text, cfg);
    s.text = std::move(text);
    s.terms = term_set(s.tokens);
    s.len = s.tokens.size();
    return s;
  }
};

// Concatenated question+answer query. Question and answer term sets stay
// separate so coverage can score them independently.
struct Query {
  TermSet q_terms;
  TermSet a_terms;
  std::vector<Token> all_tokens;  // question tokens then answer tokens
};

inline Query form_query(std::string_view question, std::string_view answer,
                        const TokenizerConfig& cfg = {}) {
  if (question.empty()) throw ConfigError("form_query: empty question");
  Query q;
  q.all_tokens = tokenize(question, cfg);
  q.q_terms = term_set(q.all_tokens);
  std::vector<Token> answer_tokens = tokenize(answer, cfg);
  q.a_terms = term_set(answer_tokens);
  q.all_tokens.insert(q.all_tokens.end(),
                      std::make_move_iterator(answer_tokens.begin()),
                      std::make_move_iterator(answer_tokens.end()));
  return q;
}

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  // Duplicate query tokens contribute once when set; the standard reading.
  bool unique_query_terms = true;

  void validate() const {
    if (k1 < 0.0) throw ConfigError("bm25: k1 must be >= 0");
    if (b < 0.0 || b > 1.0) throw ConfigError("bm25: b must be in [0, 1]");
  }
};

// score(q, s) = sum over query terms of idf(t) * tf*(k1+1) / (tf + k1*(1 - b
// + b*len/avg_len)). Zero iff no query term occurs in the sentence.
template <StatsLike Stats>
double bm25_score(const Query& query, const Sentence& sent, const Stats& stats,
                  const Bm25Params& params = {}) {
  if (sent.len == 0 || query.all_tokens.empty()) return 0.0;
  std::unordered_map<std::string_view, std::uint32_t> tf;
  for (const Token& t : sent.tokens) ++tf[t];
  std::unordered_set<std::string_view> seen;
  double score = 0.0;
  for (const Token& t : query.all_tokens) {
    if (params.unique_query_terms && !seen.insert(t).second) continue;
    const auto it = tf.find(t);
    if (it == tf.end()) continue;
    const double f = static_cast<double>(it->second);
    const double norm =
        f + params.k1 * (1.0 - params.b +
                         params.b * static_cast<double>(sent.len) / stats.avg_len);
    const double w = (f * (params.k1 + 1.0)) / norm;
    score += idf(t, stats) * w;
  }
  return score;
}

struct Posting {
  std::size_t doc = 0;  // sentence position == Sentence::idx
  std::uint32_t tf = 0;
};

// Immutable inverted index over a sentence collection. Safe for concurrent
// read-only queries after build.
class Index {
 public:
  // Requires sentences[i].idx == i. Postings lists end up sorted by sentence
  // idx; doc_freq equals each postings-list length.
  static Index build(std::vector<Sentence> sentences, TokenizerConfig cfg = {}) {
    if (sentences.empty()) throw DataError("build_index: empty input");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (sentences[i].idx != i) {
        throw DataError("build_index: sentence idx must equal its position");
      }
    }
    Index index;
    index.cfg_ = std::move(cfg);
    index.stats_ = build_stats(sentences);
    for (const Sentence& s : sentences) {
      std::map<std::string_view, std::uint32_t> counts;
      for (const Token& t : s.tokens) ++counts[t];
      for (const auto& [term, tf] : counts) {
        index.postings_[Token(term)].push_back(Posting{s.idx, tf});
      }
    }
    index.sentences_ = std::move(sentences);
    return index;
  }

  const CorpusStats& stats() const { return stats_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const TokenizerConfig& tokenizer() const { return cfg_; }

  const std::vector<Posting>* postings(const Token& term) const {
    const auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
  }

  void save(const std::filesystem::path& path) const;
  static Index load(const std::filesystem::path& path);

 private:
  std::vector<Sentence> sentences_;
  CorpusStats stats_;
  std::map<Token, std::vector<Posting>> postings_;  // sorted: deterministic cache bytes
  TokenizerConfig cfg_;
};

struct RetrievedSentence {
  Sentence sentence;
  double bm25 = 0.0;
};

// Top-n sentences by BM25, descending, ties broken by ascending idx. Only
// strictly positive scores qualify, so the result may be shorter than n.
inline std::vector<RetrievedSentence> retrieve_top_n(const Query& query,
                                                     const Index& index,
                                                     std::size_t n,
                                                     const Bm25Params& params = {}) {
  if (n < 1) throw ConfigError("retrieve_top_n: n must be >= 1");
  const CorpusStats& stats = index.stats();
  std::unordered_map<std::size_t, double> acc;
  std::unordered_set<std::string_view> seen;
  for (const Token& t : query.all_tokens) {
    if (params.unique_query_terms && !seen.insert(t).second) continue;
    const auto* plist = index.postings(t);
    if (!plist) continue;
    const double term_idf = idf(t, stats);
    for (const Posting& p : *plist) {
      const double f = static_cast<double>(p.tf);
      const double len = static_cast<double>(index.sentences()[p.doc].len);
      const double norm =
          f + params.k1 * (1.0 - params.b + params.b * len / stats.avg_len);
      const double w = (f * (params.k1 + 1.0)) / norm;
      acc[p.doc] += term_idf * w;
    }
  }
  std::vector<std::pair<std::size_t, double>> hits;
  hits.reserve(acc.size());
  for (const auto& [doc, score] : acc) {
    if (score > 0.0) hits.emplace_back(doc, score);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (hits.size() > n) hits.resize(n);
  std::vector<RetrievedSentence> out;
  out.reserve(hits.size());
  for (const auto& [doc, score] : hits) {
    out.push_back(RetrievedSentence{index.sentences()[doc], score});
  }
  return out;
}

// --- binary cache format -------------------------------------------------
//
// Little-endian throughout. Layout: magic "ROCC.IDX", u32 version, tokenizer
// config (stopwords sorted), u64 n_docs, f64 avg_len, sentences (idx, text),
// postings sorted by term. Tokens are re-derived on load from the embedded
// tokenizer config, so identical input always produces identical bytes.

namespace detail {

inline constexpr char kIndexMagic[8] = {'R', 'O', 'C', 'C', '.', 'I', 'D', 'X'};
inline constexpr std::uint32_t kIndexVersion = 1;

inline void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

inline void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void write_str(std::ostream& out, std::string_view s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint32_t read_u32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  if (!in) throw DataError("index cache: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(buf[i]);
  return v;
}

inline std::uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  if (!in) throw DataError("index cache: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(buf[i]);
  return v;
}

inline double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_u64(in));
}

inline std::string read_str(std::istream& in) {
  const std::uint64_t len = read_u64(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("index cache: truncated string");
  return s;
}

}  // namespace detail

inline void Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open index cache for writing: " + path.string());
  out.write(detail::kIndexMagic, sizeof(detail::kIndexMagic));
  detail::write_u32(out, detail::kIndexVersion);
  detail::write_u32(out, cfg_.lowercase ? 1 : 0);
  detail::write_u64(out, cfg_.min_token_len);
  std::vector<Token> stop(cfg_.stopwords.begin(), cfg_.stopwords.end());
  std::sort(stop.begin(), stop.end());
  detail::write_u64(out, stop.size());
  for (const Token& t : stop) detail::write_str(out, t);
  detail::write_u64(out, stats_.n_docs);
  detail::write_f64(out, stats_.avg_len);
  detail::write_u64(out, sentences_.size());
  for (const Sentence& s : sentences_) {
    detail::write_u64(out, s.idx);
    detail::write_str(out, s.text);
  }
  detail::write_u64(out, postings_.size());
  for (const auto& [term, plist] : postings_) {
    detail::write_str(out, term);
    detail::write_u64(out, plist.size());
    for (const Posting& p : plist) {
      detail::write_u64(out, p.doc);
      detail::write_u32(out, p.tf);
    }
  }
  if (!out) throw DataError("failed writing index cache: " + path.string());
}

inline Index Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index cache: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kIndexMagic, 8) != 0) {
    throw DataError("not an index cache file: " + path.string());
  }
  const std::uint32_t version = detail::read_u32(in);
  if (version != detail::kIndexVersion) {
    throw DataError("unsupported index cache version " + std::to_string(version));
  }
  Index index;
  index.cfg_.lowercase = detail::read_u32(in) != 0;
  index.cfg_.min_token_len = detail::read_u64(in);
  const std::uint64_t n_stop = detail::read_u64(in);
  for (std::uint64_t i = 0; i < n_stop; ++i) {
    index.cfg_.stopwords.insert(detail::read_str(in));
  }
  index.stats_.n_docs = detail::read_u64(in);
  index.stats_.avg_len = detail::read_f64(in);
  const std::uint64_t n_sents = detail::read_u64(in);
  index.sentences_.reserve(n_sents);
  for (std::uint64_t i = 0; i < n_sents; ++i) {
    const std::uint64_t idx = detail::read_u64(in);
    index.sentences_.push_back(Sentence::make(idx, detail::read_str(in), index.cfg_));
  }
  const std::uint64_t n_terms = detail::read_u64(in);
  for (std::uint64_t i = 0; i < n_terms; ++i) {
    Token term = detail::read_str(in);
    const std::uint64_t n_postings = detail::read_u64(in);
    std::vector<Posting> plist;
    plist.reserve(n_postings);
    for (std::uint64_t j = 0; j < n_postings; ++j) {
      Posting p;
      p.doc = detail::read_u64(in);
      p.tf = detail::read_u32(in);
      plist.push_back(p);
    }
    index.stats_.doc_freq[term] = plist.size();
    index.postings_.emplace(std::move(term), std::move(plist));
  }
  return index;
}

}  // namespace rocc
