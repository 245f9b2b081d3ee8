#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rocc/errors.hpp"
#include "rocc/retrieval.hpp"
#include "rocc/text.hpp"

namespace rocc {

// Raw components of the combined set score. r, o, c_q, c_a are always the
// unablated values; s applies the active ablation mask.
struct ScoreBreakdown {
  double r = 0.0;
  double o = 0.0;
  double c_q = 0.0;
  double c_a = 0.0;
  double s = 0.0;
};

struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<Token, std::vector<float>> vectors;

  const std::vector<float>* find(const Token& term) const {
    const auto it = vectors.find(term);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

struct AlignmentConfig {
  double threshold = 0.95;
  std::shared_ptr<const EmbeddingTable> embeddings;
};

// Each flag removes its factor from the combined score; the raw components
// are still reported. r_only overrides everything else.
struct AblationFlags {
  bool no_idf = false;
  bool no_c_answer = false;
  bool no_c_question = false;
  bool no_overlap = false;
  bool r_only = false;
};

struct RoccConfig {
  double epsilon = 1.0;
  AblationFlags ablation;
  // Exact term match when empty; otherwise equality or embedding cosine
  // above the threshold.
  std::optional<AlignmentConfig> alignment;
  // The overlap sum runs over ordered pairs, giving range [0, 2]. This
  // switch halves it, equivalent to summing each unordered pair once.
  bool unordered_overlap = false;

  void validate() const {
    if (epsilon <= 0.0) throw ConfigError("rocc: epsilon must be > 0");
    if (alignment && !alignment->embeddings) {
      throw ConfigError("rocc: alignment matcher requires an embedding table");
    }
  }
};

inline double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Exact mode: string equality. Alignment mode: equality, or cosine above the
// threshold when both terms have vectors; a missing vector falls back to
// plain equality for that pair.
inline bool match(const Token& a, const Token& b, const RoccConfig& cfg = {}) {
  if (a == b) return true;
  if (!cfg.alignment || !cfg.alignment->embeddings) return false;
  const EmbeddingTable& table = *cfg.alignment->embeddings;
  const std::vector<float>* va = table.find(a);
  const std::vector<float>* vb = table.find(b);
  if (!va || !vb) return false;
  return cosine(*va, *vb) > cfg.alignment->threshold;
}

namespace detail {

// |{x in a : exists y in b with match(x, y)}|. Asymmetric under the
// alignment matcher; reduces to |a intersect b| in exact mode.
inline std::size_t soft_intersection(const TermSet& a, const TermSet& b,
                                     const RoccConfig& cfg) {
  if (!cfg.alignment) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++count;
        ++ia;
        ++ib;
      }
    }
    return count;
  }
  std::size_t count = 0;
  for (const Token& x : a) {
    if (b.count(x)) {
      ++count;
      continue;
    }
    for (const Token& y : b) {
      if (match(x, y, cfg)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

inline bool matches_any(const Token& x, const TermSet& terms,
                        const RoccConfig& cfg) {
  if (terms.count(x)) return true;
  if (!cfg.alignment) return false;
  for (const Token& y : terms) {
    if (match(x, y, cfg)) return true;
  }
  return false;
}

}  // namespace detail

// Arithmetic mean of member BM25 scores.
template <StatsLike Stats>
double relevance(std::span<const Sentence> set, const Query& query,
                 const Stats& stats, const Bm25Params& params = {}) {
  if (set.empty()) throw ConfigError("relevance: empty justification set");
  double sum = 0.0;
  for (const Sentence& s : set) sum += bm25_score(query, s, stats, params);
  return sum / static_cast<double>(set.size());
}

// Mean pairwise term overlap: the sum over ordered pairs (i, j), i != j, of
// |t(s_i) ∩ t(s_j)| / max(|t(s_i)|, |t(s_j)|), normalized by the number of
// unordered pairs. Zero when the set has fewer than two sentences.
inline double overlap(std::span<const Sentence> set, const RoccConfig& cfg = {}) {
  const std::size_t k = set.size();
  if (k < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const TermSet& a = set[i].terms;
      const TermSet& b = set[j].terms;
      const double denom = static_cast<double>(std::max(a.size(), b.size()));
      if (denom == 0.0) continue;  // empty term sets carry no redundancy
      sum += static_cast<double>(detail::soft_intersection(a, b, cfg)) / denom +
             static_cast<double>(detail::soft_intersection(b, a, cfg)) / denom;
    }
  }
  const double pairs = static_cast<double>(k * (k - 1) / 2);
  return cfg.unordered_overlap ? sum / (2.0 * pairs) : sum / pairs;
}

// IDF-weighted fraction of X's terms present in any sentence of the set. An
// X-term counts as covered if any sentence term matches it, weighted by the
// X-term's own IDF (or 1 under the no_idf ablation).
template <StatsLike Stats>
double coverage(const TermSet& x_terms, std::span<const Sentence> set,
                const Stats& stats, const RoccConfig& cfg = {}) {
  if (x_terms.empty()) return 0.0;
  double sum = 0.0;
  for (const Token& x : x_terms) {
    bool covered = false;
    for (const Sentence& s : set) {
      if (detail::matches_any(x, s.terms, cfg)) {
        covered = true;
        break;
      }
    }
    if (covered) sum += cfg.ablation.no_idf ? 1.0 : idf(x, stats);
  }
  return sum / static_cast<double>(x_terms.size());
}

// S = R / (eps + O) * (eps + C(A)) * (eps + C(Q)), with ablated factors
// removed from the product rather than zeroed.
inline double combine_score(double r, double o, double c_a, double c_q,
                            double epsilon, const AblationFlags& ab = {}) {
  if (ab.r_only) return r;
  double s = ab.no_overlap ? r : r / (epsilon + o);
  if (!ab.no_c_answer) s *= epsilon + c_a;
  if (!ab.no_c_question) s *= epsilon + c_q;
  return s;
}

template <StatsLike Stats>
ScoreBreakdown rocc_score(std::span<const Sentence> set, const Query& query,
                          const Stats& stats, const Bm25Params& params = {},
                          const RoccConfig& cfg = {}) {
  if (set.empty()) throw ConfigError("rocc_score: empty justification set");
  ScoreBreakdown b;
  b.r = relevance(set, query, stats, params);
  b.o = overlap(set, cfg);
  b.c_q = coverage(query.q_terms, set, stats, cfg);
  b.c_a = coverage(query.a_terms, set, stats, cfg);
  b.s = combine_score(b.r, b.o, b.c_a, b.c_q, cfg.epsilon, cfg.ablation);
  return b;
}

}  // namespace rocc
