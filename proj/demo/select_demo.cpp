// Minimal library walkthrough: index a small KB, retrieve candidates for a
// question, and pick the best justification set across sizes.

#include <iostream>
#include <string>
#include <vector>

#include "rocc/rocc.hpp"

int main() {
  const std::vector<std::string> kb_lines = {
      "the digestive system includes the esophagus stomach and intestines",
      "the liver and pancreas support digestion with enzymes and bile",
      "the colon absorbs water near the end of digestion",
      "stars are giant balls of burning gas",
      "the excretory system removes waste through the kidneys",
      "rocks erode slowly under wind and rain",
  };
  std::vector<rocc::Sentence> sentences;
  for (std::size_t i = 0; i < kb_lines.size(); ++i) {
    sentences.push_back(rocc::Sentence::make(i, kb_lines[i]));
  }
  const rocc::Index index = rocc::Index::build(std::move(sentences));

  const rocc::Query query = rocc::form_query(
      "to which system do the esophagus liver pancreas and colon belong",
      "digestive system");

  const auto retrieved = rocc::retrieve_top_n(query, index, 5);
  std::cout << "retrieved " << retrieved.size() << " candidates\n";
  std::vector<rocc::Sentence> candidates;
  std::vector<double> scores;
  for (const auto& r : retrieved) {
    candidates.push_back(r.sentence);
    scores.push_back(r.bm25);
  }

  const std::vector<std::size_t> k_values = {2, 3};
  const rocc::JustificationSet best = rocc::select_auto(
      query, candidates, index.stats(), rocc::Bm25Params{}, rocc::RoccConfig{},
      k_values);

  std::cout << "chose k=" << best.k << "  score=" << best.breakdown.s
            << "  (r=" << best.breakdown.r << " o=" << best.breakdown.o
            << " c_q=" << best.breakdown.c_q << " c_a=" << best.breakdown.c_a
            << ")\n";
  for (const rocc::Sentence& s : rocc::finalize(best, candidates, false, scores)) {
    std::cout << "  [" << s.idx << "] " << s.text << "\n";
  }
  return 0;
}
