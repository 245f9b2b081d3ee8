#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rocc/errors.hpp"

namespace rocc {

struct PrfScore {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
};

namespace detail {

inline std::size_t intersection_size(const std::set<std::size_t>& a,
                                     const std::set<std::size_t>& b) {
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

}  // namespace detail

// p = |pred ∩ gold| / |pred| (0 for empty pred), r = |pred ∩ gold| / |gold|,
// f1 = harmonic mean (0 when p + r = 0). Instances with empty gold are
// skipped by aggregate(), not an error.
inline PrfScore prf_single(const std::set<std::size_t>& predicted,
                           const std::set<std::size_t>& gold) {
  PrfScore score;
  if (gold.empty()) return score;
  const double inter =
      static_cast<double>(detail::intersection_size(predicted, gold));
  score.p = predicted.empty() ? 0.0 : inter / static_cast<double>(predicted.size());
  score.r = inter / static_cast<double>(gold.size());
  score.f1 = score.p + score.r == 0.0
                 ? 0.0
                 : 2.0 * score.p * score.r / (score.p + score.r);
  return score;
}

struct EvalInput {
  std::string id;
  std::set<std::size_t> predicted;
  std::set<std::size_t> gold;  // empty means no gold available
};

struct InstanceScore {
  std::string id;
  PrfScore score;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
  std::size_t n_inter = 0;
};

struct JustificationMetrics {
  // Micro-averaged: sums of intersection sizes over sums of predicted/gold
  // sizes; f1 is the harmonic mean of these.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Macro-averaged per-instance means, reported alongside.
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<InstanceScore> per_question;
  std::size_t n_scored = 0;
  std::size_t n_skipped = 0;
};

inline JustificationMetrics aggregate(std::span<const EvalInput> inputs) {
  JustificationMetrics metrics;
  std::size_t sum_inter = 0, sum_pred = 0, sum_gold = 0;
  double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
  for (const EvalInput& input : inputs) {
    if (input.gold.empty()) {
      ++metrics.n_skipped;
      continue;
    }
    InstanceScore inst;
    inst.id = input.id;
    inst.n_pred = input.predicted.size();
    inst.n_gold = input.gold.size();
    inst.n_inter = detail::intersection_size(input.predicted, input.gold);
    inst.score = prf_single(input.predicted, input.gold);
    sum_inter += inst.n_inter;
    sum_pred += inst.n_pred;
    sum_gold += inst.n_gold;
    macro_p += inst.score.p;
    macro_r += inst.score.r;
    macro_f1 += inst.score.f1;
    metrics.per_question.push_back(std::move(inst));
    ++metrics.n_scored;
  }
  if (metrics.n_scored == 0) {
    throw DataError("aggregate: no scorable instances (missing gold)");
  }
  metrics.precision = sum_pred == 0 ? 0.0
                                    : static_cast<double>(sum_inter) /
                                          static_cast<double>(sum_pred);
  metrics.recall = static_cast<double>(sum_inter) / static_cast<double>(sum_gold);
  metrics.f1 = metrics.precision + metrics.recall == 0.0
                   ? 0.0
                   : 2.0 * metrics.precision * metrics.recall /
                         (metrics.precision + metrics.recall);
  const double n = static_cast<double>(metrics.n_scored);
  metrics.macro_precision = macro_p / n;
  metrics.macro_recall = macro_r / n;
  metrics.macro_f1 = macro_f1 / n;
  return metrics;
}

}  // namespace rocc
