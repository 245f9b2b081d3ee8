#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rocc/datasets.hpp"
#include "rocc/errors.hpp"
#include "rocc/eval.hpp"
#include "rocc/retrieval.hpp"
#include "rocc/selector.hpp"

namespace rocc {

// Per-instance selection result. `predicted_idxs` and `display_order` carry
// original sentence indices (passage positions or KB line numbers).
struct SelectionRecord {
  std::string id;
  bool ok = false;
  std::string error;
  std::size_t k = 0;
  ScoreBreakdown breakdown;
  std::vector<std::size_t> predicted_idxs;  // sorted ascending
  std::vector<std::size_t> display_order;   // finalized order
  std::vector<std::size_t> k_values_used;

  std::string justification_text;  // passage mode: concatenated, index-ordered

  struct ScoredText {
    std::size_t idx = 0;
    std::string text;
    double bm25 = 0.0;
  };
  std::vector<ScoredText> sentences;  // KB mode: per-sentence, finalized order

  struct RunnerUp {
    std::vector<std::size_t> idxs;
    std::size_t k = 0;
    ScoreBreakdown breakdown;
  };
  std::vector<RunnerUp> runners_up;
};

namespace detail {

// Drops k values larger than the candidate pool so short passages still get
// the feasible part of an AutoROCC range.
inline std::vector<std::size_t> feasible_k_values(
    std::span<const std::size_t> k_values, std::size_t n_candidates) {
  std::vector<std::size_t> out;
  for (const std::size_t k : k_values) {
    if (k <= n_candidates) out.push_back(k);
  }
  return out;
}

template <StatsLike Stats>
void fill_selection(SelectionRecord& record, const Query& query,
                    std::span<const Sentence> candidates, const Stats& stats,
                    const Bm25Params& params, const RoccConfig& rocc_cfg,
                    const SelectionConfig& sel) {
  const std::vector<std::size_t> ks =
      feasible_k_values(sel.k_values, candidates.size());
  if (ks.empty()) {
    throw DataError("no feasible set size for " +
                    std::to_string(candidates.size()) + " candidates");
  }
  record.k_values_used = ks;
  const std::vector<JustificationSet> ranked = select_ranked(
      query, candidates, stats, params, rocc_cfg, ks, sel.opts);
  const JustificationSet& best = ranked.front();
  record.k = best.k;
  record.breakdown = best.breakdown;
  for (const std::size_t pos : best.member_idxs) {
    record.predicted_idxs.push_back(candidates[pos].idx);
  }
  std::sort(record.predicted_idxs.begin(), record.predicted_idxs.end());
  std::vector<double> scores;
  std::unordered_map<std::size_t, double> score_by_idx;
  if (!sel.reorder_by_index) {
    scores.reserve(candidates.size());
    for (const Sentence& c : candidates) {
      scores.push_back(bm25_score(query, c, stats, params));
      score_by_idx.emplace(c.idx, scores.back());
    }
  }
  const std::vector<Sentence> ordered =
      finalize(best, candidates, sel.reorder_by_index, scores);
  for (const Sentence& s : ordered) {
    record.display_order.push_back(s.idx);
    if (sel.reorder_by_index) {
      if (!record.justification_text.empty()) record.justification_text += " ";
      record.justification_text += s.text;
    } else {
      record.sentences.push_back(
          SelectionRecord::ScoredText{s.idx, s.text, score_by_idx.at(s.idx)});
    }
  }
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    SelectionRecord::RunnerUp ru;
    for (const std::size_t pos : ranked[i].member_idxs) {
      ru.idxs.push_back(candidates[pos].idx);
    }
    ru.k = ranked[i].k;
    ru.breakdown = ranked[i].breakdown;
    record.runners_up.push_back(std::move(ru));
  }
  record.ok = true;
}

}  // namespace detail

// Passage mode: every passage sentence is a candidate; document statistics
// come from the passage itself.
inline SelectionRecord select_passage_instance(const QAInstance& inst,
                                               const TokenizerConfig& tok_cfg,
                                               const Bm25Params& params,
                                               const RoccConfig& rocc_cfg,
                                               const SelectionConfig& sel) {
  SelectionRecord record;
  record.id = inst.id;
  try {
    if (!inst.candidates || inst.candidates->empty()) {
      throw DataError("passage mode requires candidate sentences");
    }
    std::vector<Sentence> candidates;
    candidates.reserve(inst.candidates->size());
    for (const CandidateText& c : *inst.candidates) {
      candidates.push_back(Sentence::make(c.idx, c.text, tok_cfg));
    }
    const Query query = form_query(inst.question, inst.answer, tok_cfg);
    const CorpusStats stats = build_stats(candidates);
    detail::fill_selection(record, query, candidates, stats, params, rocc_cfg, sel);
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
  }
  return record;
}

// KB mode: candidates are the top-n BM25 retrievals; document statistics
// come from the whole KB behind the index.
inline SelectionRecord select_kb_instance(const QAInstance& inst,
                                          const Index& index,
                                          const Bm25Params& params,
                                          const RoccConfig& rocc_cfg,
                                          const SelectionConfig& sel) {
  SelectionRecord record;
  record.id = inst.id;
  try {
    const Query query = form_query(inst.question, inst.answer, index.tokenizer());
    const std::vector<RetrievedSentence> retrieved =
        retrieve_top_n(query, index, sel.n, params);
    if (retrieved.empty()) {
      throw DataError("no candidate sentences retrieved");
    }
    std::vector<Sentence> candidates;
    candidates.reserve(retrieved.size());
    for (const RetrievedSentence& r : retrieved) candidates.push_back(r.sentence);
    detail::fill_selection(record, query, candidates, index.stats(), params,
                           rocc_cfg, sel);
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
  }
  return record;
}

// Joins selection records with dataset gold annotations by id for scoring.
// `correct_only` restricts scoring to instances labeled correct.
inline std::vector<EvalInput> join_for_eval(
    std::span<const SelectionRecord> records,
    std::span<const QAInstance> instances, bool correct_only = false) {
  std::unordered_map<std::string_view, const QAInstance*> by_id;
  for (const QAInstance& inst : instances) by_id.emplace(inst.id, &inst);
  std::vector<EvalInput> inputs;
  for (const SelectionRecord& record : records) {
    const auto it = by_id.find(record.id);
    if (it == by_id.end()) {
      throw DataError("selection id '" + record.id + "' not present in dataset");
    }
    const QAInstance& inst = *it->second;
    if (correct_only && inst.label != Label::correct) continue;
    if (!record.ok) continue;
    EvalInput input;
    input.id = record.id;
    input.predicted.insert(record.predicted_idxs.begin(),
                           record.predicted_idxs.end());
    if (inst.gold_idxs) input.gold = *inst.gold_idxs;
    inputs.push_back(std::move(input));
  }
  return inputs;
}

}  // namespace rocc
