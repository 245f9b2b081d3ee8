#pragma once

// Independent brute-force reference used only by tests. Re-derives document
// statistics, BM25, pairwise overlap, weighted coverage, the combined set
// score, and exhaustive argmax selection from first principles, sharing no
// scoring code with the library. Keep it dumb and obvious.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rocc/retrieval.hpp"
#include "rocc/scoring.hpp"

namespace oracle {

struct Stats {
  std::size_t n_docs = 0;
  std::map<std::string, std::size_t> df;
  double avg_len = 0.0;
};

inline Stats recount(const std::vector<rocc::Sentence>& corpus) {
  Stats stats;
  std::size_t total = 0;
  for (const rocc::Sentence& s : corpus) {
    ++stats.n_docs;
    total += s.tokens.size();
    std::set<std::string> uniq(s.tokens.begin(), s.tokens.end());
    for (const std::string& t : uniq) ++stats.df[t];
  }
  stats.avg_len = static_cast<double>(total) / static_cast<double>(stats.n_docs);
  return stats;
}

inline double idf(const std::string& term, const Stats& stats) {
  const auto it = stats.df.find(term);
  const double df = it == stats.df.end() ? 0.0 : static_cast<double>(it->second);
  const double n = static_cast<double>(stats.n_docs);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

inline double bm25(const rocc::Query& query, const rocc::Sentence& sent,
                   const Stats& stats, const rocc::Bm25Params& params) {
  if (sent.tokens.empty() || query.all_tokens.empty()) return 0.0;
  std::map<std::string, std::size_t> tf;
  for (const std::string& t : sent.tokens) ++tf[t];
  std::set<std::string> seen;
  double score = 0.0;
  for (const std::string& t : query.all_tokens) {
    if (params.unique_query_terms && !seen.insert(t).second) continue;
    const auto it = tf.find(t);
    if (it == tf.end()) continue;
    const double f = static_cast<double>(it->second);
    const double norm =
        f + params.k1 * (1.0 - params.b +
                         params.b * static_cast<double>(sent.tokens.size()) /
                             stats.avg_len);
    const double w = (f * (params.k1 + 1.0)) / norm;
    score += idf(t, stats) * w;
  }
  return score;
}

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
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

inline bool term_match(const std::string& a, const std::string& b,
                       const rocc::RoccConfig& cfg) {
  if (a == b) return true;
  if (!cfg.alignment || !cfg.alignment->embeddings) return false;
  const auto& vecs = cfg.alignment->embeddings->vectors;
  const auto ia = vecs.find(a);
  const auto ib = vecs.find(b);
  if (ia == vecs.end() || ib == vecs.end()) return false;
  return cosine(ia->second, ib->second) > cfg.alignment->threshold;
}

inline std::size_t matched_count(const std::set<std::string>& a,
                                 const std::set<std::string>& b,
                                 const rocc::RoccConfig& cfg) {
  std::size_t count = 0;
  for (const std::string& x : a) {
    for (const std::string& y : b) {
      if (term_match(x, y, cfg)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

inline double overlap(const std::vector<std::set<std::string>>& term_sets,
                      const rocc::RoccConfig& cfg) {
  const std::size_t k = term_sets.size();
  if (k < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double denom = static_cast<double>(
          std::max(term_sets[i].size(), term_sets[j].size()));
      if (denom == 0.0) continue;
      sum += static_cast<double>(matched_count(term_sets[i], term_sets[j], cfg)) /
                 denom +
             static_cast<double>(matched_count(term_sets[j], term_sets[i], cfg)) /
                 denom;
    }
  }
  const double pairs = static_cast<double>(k * (k - 1) / 2);
  return cfg.unordered_overlap ? sum / (2.0 * pairs) : sum / pairs;
}

inline double coverage(const std::set<std::string>& x_terms,
                       const std::vector<std::set<std::string>>& term_sets,
                       const Stats& stats, const rocc::RoccConfig& cfg) {
  if (x_terms.empty()) return 0.0;
  double sum = 0.0;
  for (const std::string& x : x_terms) {
    bool covered = false;
    for (const auto& terms : term_sets) {
      for (const std::string& y : terms) {
        if (term_match(x, y, cfg)) {
          covered = true;
          break;
        }
      }
      if (covered) break;
    }
    if (covered) sum += cfg.ablation.no_idf ? 1.0 : idf(x, stats);
  }
  return sum / static_cast<double>(x_terms.size());
}

inline double combine(double r, double o, double c_a, double c_q,
                      const rocc::RoccConfig& cfg) {
  if (cfg.ablation.r_only) return r;
  double s = cfg.ablation.no_overlap ? r : r / (cfg.epsilon + o);
  if (!cfg.ablation.no_c_answer) s *= cfg.epsilon + c_a;
  if (!cfg.ablation.no_c_question) s *= cfg.epsilon + c_q;
  return s;
}

inline rocc::ScoreBreakdown score_set(const std::vector<std::size_t>& members,
                                      const rocc::Query& query,
                                      const std::vector<rocc::Sentence>& candidates,
                                      const Stats& stats,
                                      const rocc::Bm25Params& params,
                                      const rocc::RoccConfig& cfg) {
  rocc::ScoreBreakdown b;
  double bm_sum = 0.0;
  std::vector<std::set<std::string>> term_sets;
  for (const std::size_t i : members) {
    bm_sum += bm25(query, candidates[i], stats, params);
    term_sets.emplace_back(candidates[i].tokens.begin(),
                           candidates[i].tokens.end());
  }
  b.r = bm_sum / static_cast<double>(members.size());
  b.o = overlap(term_sets, cfg);
  const std::set<std::string> q_terms(query.q_terms.begin(), query.q_terms.end());
  const std::set<std::string> a_terms(query.a_terms.begin(), query.a_terms.end());
  b.c_q = coverage(q_terms, term_sets, stats, cfg);
  b.c_a = coverage(a_terms, term_sets, stats, cfg);
  b.s = combine(b.r, b.o, b.c_a, b.c_q, cfg);
  return b;
}

struct Selection {
  std::vector<std::size_t> member_idxs;
  std::size_t k = 0;
  rocc::ScoreBreakdown breakdown;
  bool valid = false;
};

inline bool precedes(const Selection& a, const Selection& b) {
  if (a.breakdown.s != b.breakdown.s) return a.breakdown.s > b.breakdown.s;
  if (a.k != b.k) return a.k < b.k;
  return a.member_idxs < b.member_idxs;
}

inline void enumerate(std::size_t n, std::size_t k, std::size_t start,
                      std::vector<std::size_t>& prefix,
                      const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (prefix.size() == k) {
    fn(prefix);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    prefix.push_back(i);
    enumerate(n, k, i + 1, prefix, fn);
    prefix.pop_back();
  }
}

// Exhaustive argmax over every set of every size in k_values, with the same
// tie order as the library: score desc, size asc, lexicographic indices.
inline Selection select_best(const rocc::Query& query,
                             const std::vector<rocc::Sentence>& candidates,
                             const rocc::Bm25Params& params,
                             const rocc::RoccConfig& cfg,
                             const std::vector<std::size_t>& k_values) {
  const Stats stats = recount(candidates);
  Selection best;
  for (const std::size_t k : k_values) {
    std::vector<std::size_t> prefix;
    enumerate(candidates.size(), k, 0, prefix,
              [&](const std::vector<std::size_t>& members) {
                Selection cur;
                cur.member_idxs = members;
                cur.k = k;
                cur.breakdown =
                    score_set(members, query, candidates, stats, params, cfg);
                cur.valid = true;
                if (!best.valid || precedes(cur, best)) best = std::move(cur);
              });
  }
  return best;
}

}  // namespace oracle
