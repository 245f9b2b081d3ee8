#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rocc/errors.hpp"
#include "rocc/retrieval.hpp"
#include "rocc/scoring.hpp"
#include "rocc/text.hpp"

namespace rocc {

// A scored candidate justification set. member_idxs are strictly increasing
// positions into the candidate sequence (equal to passage sentence indices
// in passage mode, retrieval ranks in KB mode).
struct JustificationSet {
  std::vector<std::size_t> member_idxs;
  std::size_t k = 0;
  ScoreBreakdown breakdown;
};

// Streams all C(n, k) index combinations in lexicographic order.
//
//   CombinationEnumerator e(n, k);
//   while (e.next()) use(e.current());
class CombinationEnumerator {
 public:
  CombinationEnumerator(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (k > n) throw ConfigError("enumerate_sets: k exceeds candidate count");
    idx_.resize(k);
  }

  bool next() {
    if (done_) return false;
    if (!started_) {
      started_ = true;
      for (std::size_t i = 0; i < k_; ++i) idx_[i] = i;
      return true;
    }
    std::size_t i = k_;
    while (i > 0) {
      --i;
      if (idx_[i] + (k_ - i) < n_) {
        ++idx_[i];
        for (std::size_t j = i + 1; j < k_; ++j) idx_[j] = idx_[j - 1] + 1;
        return true;
      }
    }
    done_ = true;
    return false;
  }

  std::span<const std::size_t> current() const { return idx_; }

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::vector<std::size_t> idx_;
};

struct SelectOptions {
  // 0 keeps the exhaustive search; otherwise a level-synchronous beam that
  // keeps only this many prefixes per set size. Approximate.
  std::size_t beam_width = 0;
  bool allow_singletons = false;  // permits k = 1 for diagnostics
  std::size_t top_m = 1;          // number of ranked sets to return
};

enum class SelectionMode { parametric, auto_k };

struct SelectionConfig {
  std::size_t n = 20;  // retrieval depth in KB mode
  std::vector<std::size_t> k_values;
  SelectionMode mode = SelectionMode::parametric;
  bool reorder_by_index = true;  // passage order; off = descending BM25
  SelectOptions opts;

  void validate() const {
    if (n < 1) throw ConfigError("selection: n must be >= 1");
    if (k_values.empty()) throw ConfigError("selection: no k values given");
    const std::size_t min_k = opts.allow_singletons ? 1 : 2;
    for (const std::size_t k : k_values) {
      if (k < min_k || k > n) {
        throw ConfigError("selection: k must satisfy " +
                          std::to_string(min_k) + " <= k <= n");
      }
    }
  }
};

namespace detail {

// Selection order: higher combined score, then smaller set, then
// lexicographically smaller member indices. Total over distinct sets.
inline bool selection_precedes(double s, std::size_t k,
                               std::span<const std::size_t> idxs,
                               const JustificationSet& other) {
  if (s != other.breakdown.s) return s > other.breakdown.s;
  if (k != other.k) return k < other.k;
  return std::lexicographical_compare(idxs.begin(), idxs.end(),
                                      other.member_idxs.begin(),
                                      other.member_idxs.end());
}

inline bool selection_precedes(const JustificationSet& a,
                               const JustificationSet& b) {
  return selection_precedes(a.breakdown.s, a.k, a.member_idxs, b);
}

// Keeps `results` sorted best-first and capped at top_m.
inline void offer_result(std::vector<JustificationSet>& results,
                         std::size_t top_m, JustificationSet candidate) {
  if (results.size() >= top_m &&
      !selection_precedes(candidate, results.back())) {
    return;
  }
  const auto pos =
      std::upper_bound(results.begin(), results.end(), candidate,
                       [](const JustificationSet& a, const JustificationSet& b) {
                         return selection_precedes(a, b);
                       });
  results.insert(pos, std::move(candidate));
  if (results.size() > top_m) results.pop_back();
}

// Per-question preprocessing for incremental set scoring: per-sentence BM25,
// pairwise overlap contributions, and per-sentence coverage bitmasks over
// the sorted question/answer vocabularies. Growing a combination by one
// member then costs O(k) updates instead of O(k^2) rescoring.
template <StatsLike Stats>
class SetScorer {
 public:
  SetScorer(const Query& query, std::span<const Sentence> candidates,
            const Stats& stats, const Bm25Params& params, const RoccConfig& cfg)
      : cands_(candidates), cfg_(cfg), m_(candidates.size()) {
    bm_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      bm_[i] = bm25_score(query, candidates[i], stats, params);
    }
    pair2_.assign(m_ * m_, 0.0);
    for (std::size_t j = 1; j < m_; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const TermSet& a = candidates[i].terms;
        const TermSet& b = candidates[j].terms;
        const double denom = static_cast<double>(std::max(a.size(), b.size()));
        if (denom == 0.0) continue;
        pair2_[i * m_ + j] =
            static_cast<double>(soft_intersection(a, b, cfg)) / denom +
            static_cast<double>(soft_intersection(b, a, cfg)) / denom;
      }
    }
    init_coverage(query.q_terms, stats, q_weight_, q_cov_, qn_, qw_);
    init_coverage(query.a_terms, stats, a_weight_, a_cov_, an_, aw_);
  }

  std::size_t size() const { return m_; }
  std::size_t q_words() const { return qw_; }
  std::size_t a_words() const { return aw_; }
  double member_bm25(std::size_t i) const { return bm_[i]; }
  double pair_sum(std::size_t i, std::size_t j) const { return pair2_[i * m_ + j]; }
  std::span<const std::uint64_t> q_mask(std::size_t i) const {
    return {q_cov_.data() + i * qw_, qw_};
  }
  std::span<const std::uint64_t> a_mask(std::size_t i) const {
    return {a_cov_.data() + i * aw_, aw_};
  }

  // Raw components and combined score for a set of size k with accumulated
  // BM25 sum, ordered-pair overlap sum, and coverage union masks.
  ScoreBreakdown evaluate(std::size_t k, double bm_sum, double pair_sum,
                          std::span<const std::uint64_t> q_union,
                          std::span<const std::uint64_t> a_union) const {
    ScoreBreakdown b;
    b.r = bm_sum / static_cast<double>(k);
    if (k >= 2) {
      const double pairs = static_cast<double>(k * (k - 1) / 2);
      b.o = cfg_.unordered_overlap ? pair_sum / (2.0 * pairs) : pair_sum / pairs;
    }
    b.c_q = qn_ == 0 ? 0.0 : weight_sum(q_union, q_weight_) /
                                 static_cast<double>(qn_);
    b.c_a = an_ == 0 ? 0.0 : weight_sum(a_union, a_weight_) /
                                 static_cast<double>(an_);
    b.s = combine_score(b.r, b.o, b.c_a, b.c_q, cfg_.epsilon, cfg_.ablation);
    return b;
  }

 private:
  void init_coverage(const TermSet& x_terms, const Stats& stats,
                     std::vector<double>& weight, std::vector<std::uint64_t>& cov,
                     std::size_t& n_terms, std::size_t& words) {
    n_terms = x_terms.size();
    words = (n_terms + 63) / 64;
    weight.reserve(n_terms);
    for (const Token& t : x_terms) {  // lexicographic: bit order == term order
      weight.push_back(cfg_.ablation.no_idf ? 1.0 : idf(t, stats));
    }
    cov.assign(m_ * words, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t bit = 0;
      for (const Token& t : x_terms) {
        if (matches_any(t, cands_[i].terms, cfg_)) {
          cov[i * words + bit / 64] |= std::uint64_t{1} << (bit % 64);
        }
        ++bit;
      }
    }
  }

  // Ascending-bit accumulation, matching the reference coverage term order.
  static double weight_sum(std::span<const std::uint64_t> mask,
                           const std::vector<double>& weight) {
    double sum = 0.0;
    for (std::size_t w = 0; w < mask.size(); ++w) {
      std::uint64_t bits = mask[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        sum += weight[w * 64 + static_cast<std::size_t>(b)];
        bits &= bits - 1;
      }
    }
    return sum;
  }

  std::span<const Sentence> cands_;
  RoccConfig cfg_;
  std::size_t m_ = 0;
  std::vector<double> bm_;
  std::vector<double> pair2_;
  std::size_t qn_ = 0, qw_ = 0, an_ = 0, aw_ = 0;
  std::vector<double> q_weight_, a_weight_;
  std::vector<std::uint64_t> q_cov_, a_cov_;
};

// Depth-first walk over all index combinations up to k_max, maintaining the
// running sums and union masks one level per depth. Every subset is visited
// exactly once; subsets whose size is flagged in `wanted` get evaluated.
template <StatsLike Stats>
std::vector<JustificationSet> exhaustive_search(const SetScorer<Stats>& scorer,
                                                const std::vector<char>& wanted,
                                                std::size_t k_max,
                                                std::size_t top_m) {
  const std::size_t m = scorer.size();
  const std::size_t qw = scorer.q_words();
  const std::size_t aw = scorer.a_words();
  std::vector<std::size_t> chosen(k_max);
  std::vector<double> bm_sum(k_max + 1, 0.0);
  std::vector<double> pair_sum(k_max + 1, 0.0);
  std::vector<std::uint64_t> q_union((k_max + 1) * qw, 0);
  std::vector<std::uint64_t> a_union((k_max + 1) * aw, 0);
  std::vector<JustificationSet> results;

  const auto dfs = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    for (std::size_t i = start; i < m; ++i) {
      const std::size_t d = depth + 1;
      chosen[depth] = i;
      bm_sum[d] = bm_sum[depth] + scorer.member_bm25(i);
      double ps = pair_sum[depth];
      for (std::size_t t = 0; t < depth; ++t) ps += scorer.pair_sum(chosen[t], i);
      pair_sum[d] = ps;
      const auto qm = scorer.q_mask(i);
      for (std::size_t w = 0; w < qw; ++w) {
        q_union[d * qw + w] = q_union[depth * qw + w] | qm[w];
      }
      const auto am = scorer.a_mask(i);
      for (std::size_t w = 0; w < aw; ++w) {
        a_union[d * aw + w] = a_union[depth * aw + w] | am[w];
      }
      if (wanted[d]) {
        const ScoreBreakdown b = scorer.evaluate(
            d, bm_sum[d], pair_sum[d], {q_union.data() + d * qw, qw},
            {a_union.data() + d * aw, aw});
        if (results.size() < top_m ||
            selection_precedes(b.s, d, {chosen.data(), d}, results.back())) {
          offer_result(results, top_m,
                       JustificationSet{{chosen.data(), chosen.data() + d}, d, b});
        }
      }
      if (d < k_max) self(self, i + 1, d);
    }
  };
  dfs(dfs, 0, 0);
  return results;
}

// Level-synchronous approximate search: grows prefixes one member at a time
// and keeps only the beam_width best per size. Prefix ranking uses the
// prefix's own combined score; ties resolve lexicographically.
template <StatsLike Stats>
std::vector<JustificationSet> beam_search(const SetScorer<Stats>& scorer,
                                          const std::vector<char>& wanted,
                                          std::size_t k_max, std::size_t top_m,
                                          std::size_t beam_width) {
  struct Node {
    std::vector<std::size_t> members;
    double bm_sum = 0.0;
    double pair_sum = 0.0;
    std::vector<std::uint64_t> q_union, a_union;
    double s = 0.0;
  };
  const std::size_t m = scorer.size();
  const std::size_t qw = scorer.q_words();
  const std::size_t aw = scorer.a_words();
  std::vector<JustificationSet> results;
  std::vector<Node> level(1);
  level[0].q_union.assign(qw, 0);
  level[0].a_union.assign(aw, 0);
  for (std::size_t depth = 1; depth <= k_max; ++depth) {
    std::vector<Node> next;
    for (const Node& node : level) {
      const std::size_t start = node.members.empty() ? 0 : node.members.back() + 1;
      for (std::size_t i = start; i < m; ++i) {
        Node child;
        child.members = node.members;
        child.members.push_back(i);
        child.bm_sum = node.bm_sum + scorer.member_bm25(i);
        double ps = node.pair_sum;
        for (const std::size_t t : node.members) ps += scorer.pair_sum(t, i);
        child.pair_sum = ps;
        child.q_union.resize(qw);
        const auto qm = scorer.q_mask(i);
        for (std::size_t w = 0; w < qw; ++w) child.q_union[w] = node.q_union[w] | qm[w];
        child.a_union.resize(aw);
        const auto am = scorer.a_mask(i);
        for (std::size_t w = 0; w < aw; ++w) child.a_union[w] = node.a_union[w] | am[w];
        const ScoreBreakdown b = scorer.evaluate(depth, child.bm_sum, child.pair_sum,
                                                 child.q_union, child.a_union);
        child.s = b.s;
        if (wanted[depth]) {
          offer_result(results, top_m,
                       JustificationSet{child.members, depth, b});
        }
        next.push_back(std::move(child));
      }
    }
    if (next.size() > beam_width) {
      std::sort(next.begin(), next.end(), [](const Node& a, const Node& b) {
        if (a.s != b.s) return a.s > b.s;
        return a.members < b.members;
      });
      next.resize(beam_width);
    }
    level = std::move(next);
    if (level.empty()) break;
  }
  return results;
}

}  // namespace detail

// All candidate sets of every size in k_values, ranked by combined score
// with deterministic tie-breaking (smaller set first, then lexicographic
// member indices). Returns at most opts.top_m sets, best first.
template <StatsLike Stats>
std::vector<JustificationSet> select_ranked(const Query& query,
                                            std::span<const Sentence> candidates,
                                            const Stats& stats,
                                            const Bm25Params& params,
                                            const RoccConfig& cfg,
                                            std::span<const std::size_t> k_values,
                                            const SelectOptions& opts = {}) {
  cfg.validate();
  params.validate();
  if (k_values.empty()) throw ConfigError("select: no k values given");
  const std::size_t min_k = opts.allow_singletons ? 1 : 2;
  std::size_t k_max = 0;
  for (const std::size_t k : k_values) {
    if (k < min_k) {
      throw ConfigError("select: k must be >= " + std::to_string(min_k));
    }
    if (k > candidates.size()) {
      throw DataError("select: insufficient candidates for k=" + std::to_string(k));
    }
    k_max = std::max(k_max, k);
  }
  std::vector<char> wanted(k_max + 1, 0);
  for (const std::size_t k : k_values) wanted[k] = 1;
  const std::size_t top_m = std::max<std::size_t>(opts.top_m, 1);
  const detail::SetScorer<Stats> scorer(query, candidates, stats, params, cfg);
  return opts.beam_width == 0
             ? detail::exhaustive_search(scorer, wanted, k_max, top_m)
             : detail::beam_search(scorer, wanted, k_max, top_m, opts.beam_width);
}

// Best set of exactly k sentences.
template <StatsLike Stats>
JustificationSet select_parametric(const Query& query,
                                   std::span<const Sentence> candidates,
                                   const Stats& stats, const Bm25Params& params,
                                   const RoccConfig& cfg, std::size_t k,
                                   const SelectOptions& opts = {}) {
  const std::size_t ks[] = {k};
  return select_ranked(query, candidates, stats, params, cfg, ks, opts).front();
}

// Global argmax across every set of every size in k_values.
template <StatsLike Stats>
JustificationSet select_auto(const Query& query,
                             std::span<const Sentence> candidates,
                             const Stats& stats, const Bm25Params& params,
                             const RoccConfig& cfg,
                             std::span<const std::size_t> k_values,
                             const SelectOptions& opts = {}) {
  return select_ranked(query, candidates, stats, params, cfg, k_values, opts).front();
}

// Orders the chosen sentences for output: ascending original index in
// passage mode, else descending individual BM25 (requires one score per
// candidate), ties by ascending index.
inline std::vector<Sentence> finalize(const JustificationSet& set,
                                      std::span<const Sentence> candidates,
                                      bool reorder_by_index,
                                      std::span<const double> bm25_scores = {}) {
  if (!reorder_by_index && bm25_scores.size() != candidates.size()) {
    throw ConfigError("finalize: BM25 ordering needs one score per candidate");
  }
  std::vector<std::pair<std::size_t, const Sentence*>> members;
  members.reserve(set.member_idxs.size());
  for (const std::size_t pos : set.member_idxs) {
    if (pos >= candidates.size()) {
      throw ConfigError("finalize: member index out of range");
    }
    members.emplace_back(pos, &candidates[pos]);
  }
  if (reorder_by_index) {
    std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
      return a.second->idx < b.second->idx;
    });
  } else {
    std::sort(members.begin(), members.end(),
              [&](const auto& a, const auto& b) {
                if (bm25_scores[a.first] != bm25_scores[b.first]) {
                  return bm25_scores[a.first] > bm25_scores[b.first];
                }
                return a.second->idx < b.second->idx;
              });
  }
  std::vector<Sentence> out;
  out.reserve(members.size());
  for (const auto& [pos, sent] : members) out.push_back(*sent);
  return out;
}

}  // namespace rocc
