#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rocc/errors.hpp"
#include "rocc/scoring.hpp"

namespace rocc {

enum class Label { unknown, correct, incorrect };

struct CandidateText {
  std::size_t idx = 0;
  std::string text;

  bool operator==(const CandidateText&) const = default;
};

// One question/answer pair. Passage-style instances carry their candidate
// sentences; KB-style instances leave them absent and rely on retrieval.
struct QAInstance {
  std::string id;
  std::string question;
  std::string answer;
  Label label = Label::unknown;
  std::optional<std::vector<CandidateText>> candidates;
  std::optional<std::set<std::size_t>> gold_idxs;

  bool operator==(const QAInstance&) const = default;
};

struct DatasetMode {
  enum class Kind { passage, kb };
  Kind kind = Kind::passage;
  std::filesystem::path kb_path;  // kb mode only
};

namespace detail {

[[noreturn]] inline void record_error(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

inline std::string require_string(const nlohmann::json& rec, const char* field,
                                  std::size_t line_no) {
  const auto it = rec.find(field);
  if (it == rec.end()) record_error(line_no, std::string("missing field '") + field + "'");
  if (!it->is_string()) record_error(line_no, std::string("field '") + field + "' must be a string");
  return it->get<std::string>();
}

}  // namespace detail

// Canonical dataset: line-delimited JSON records with fields
// {id, question, answer, label?, candidates?, gold_idxs?}.
inline std::vector<QAInstance> load_canonical(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path.string());
  std::vector<QAInstance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      detail::record_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) detail::record_error(line_no, "record must be an object");
    QAInstance inst;
    try {
      inst.id = detail::require_string(rec, "id", line_no);
      inst.question = detail::require_string(rec, "question", line_no);
      if (inst.question.empty()) {
        detail::record_error(line_no, "field 'question' must be non-empty");
      }
      inst.answer = detail::require_string(rec, "answer", line_no);
      if (const auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
        if (!it->is_string()) {
          detail::record_error(line_no, "field 'label' must be a string");
        }
        const std::string label = it->get<std::string>();
        if (label == "correct") {
          inst.label = Label::correct;
        } else if (label == "incorrect") {
          inst.label = Label::incorrect;
        } else {
          detail::record_error(line_no,
                               "field 'label' must be 'correct' or 'incorrect'");
        }
      }
      if (const auto it = rec.find("candidates"); it != rec.end() && !it->is_null()) {
        if (!it->is_array() || it->empty()) {
          detail::record_error(line_no, "field 'candidates' must be a non-empty array");
        }
        std::vector<CandidateText> candidates;
        for (std::size_t i = 0; i < it->size(); ++i) {
          const auto& c = (*it)[i];
          if (!c.is_object() || !c.contains("idx") || !c.contains("text") ||
              !c["idx"].is_number_unsigned() || !c["text"].is_string()) {
            detail::record_error(line_no, "candidate entries need 'idx' and 'text'");
          }
          CandidateText ct;
          ct.idx = c["idx"].get<std::size_t>();
          ct.text = c["text"].get<std::string>();
          if (ct.idx != i) {
            detail::record_error(line_no, "candidate idx must match document order");
          }
          candidates.push_back(std::move(ct));
        }
        inst.candidates = std::move(candidates);
      }
      if (const auto it = rec.find("gold_idxs"); it != rec.end() && !it->is_null()) {
        if (!inst.candidates) {
          detail::record_error(line_no, "gold_idxs requires candidates");
        }
        if (!it->is_array()) {
          detail::record_error(line_no, "field 'gold_idxs' must be an array");
        }
        std::set<std::size_t> gold;
        for (const auto& g : *it) {
          if (!g.is_number_unsigned()) {
            detail::record_error(line_no, "gold_idxs must be non-negative integers");
          }
          const std::size_t idx = g.get<std::size_t>();
          if (idx >= inst.candidates->size()) {
            detail::record_error(line_no, "gold index " + std::to_string(idx) +
                                              " out of candidate range");
          }
          gold.insert(idx);
        }
        inst.gold_idxs = std::move(gold);
      }
    } catch (const nlohmann::json::exception& e) {
      detail::record_error(line_no, e.what());
    }
    instances.push_back(std::move(inst));
  }
  return instances;
}

inline nlohmann::ordered_json to_canonical_json(const QAInstance& inst) {
  nlohmann::ordered_json rec;
  rec["id"] = inst.id;
  rec["question"] = inst.question;
  rec["answer"] = inst.answer;
  if (inst.label != Label::unknown) {
    rec["label"] = inst.label == Label::correct ? "correct" : "incorrect";
  }
  if (inst.candidates) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CandidateText& c : *inst.candidates) {
      arr.push_back({{"idx", c.idx}, {"text", c.text}});
    }
    rec["candidates"] = std::move(arr);
  }
  if (inst.gold_idxs) {
    rec["gold_idxs"] = std::vector<std::size_t>(inst.gold_idxs->begin(),
                                                inst.gold_idxs->end());
  }
  return rec;
}

inline void write_canonical(std::span<const QAInstance> instances,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open output: " + path.string());
  for (const QAInstance& inst : instances) {
    out << to_canonical_json(inst).dump() << '\n';
  }
  if (!out) throw DataError("failed writing: " + path.string());
}

namespace detail {

// Splits "<b>Sent 1: </b>text<br><b>Sent 2: </b>..." into sentence texts in
// document order. Display labels are 1-based; everything downstream is
// 0-based.
inline std::vector<std::string> split_passage_markup(const std::string& text) {
  std::vector<std::string> sentences;
  const std::string open = "<b>Sent ";
  std::size_t pos = text.find(open);
  if (pos == std::string::npos) {
    throw DataError("unparseable passage markup: no sentence markers");
  }
  while (pos != std::string::npos) {
    const std::size_t close = text.find("</b>", pos);
    if (close == std::string::npos) {
      throw DataError("unparseable passage markup: unterminated sentence marker");
    }
    const std::size_t body = close + 4;
    const std::size_t next = text.find(open, body);
    std::string sent = text.substr(body, next == std::string::npos
                                             ? std::string::npos
                                             : next - body);
    for (std::size_t br = sent.find("<br>"); br != std::string::npos;
         br = sent.find("<br>", br)) {
      sent.erase(br, 4);
    }
    const auto is_space = [](char c) {
      return c == ' ' || c == '\t' || c == '\n' || c == '\r';
    };
    std::size_t begin = 0, end = sent.size();
    while (begin < end && is_space(sent[begin])) ++begin;
    while (end > begin && is_space(sent[end - 1])) --end;
    sentences.push_back(sent.substr(begin, end - begin));
    pos = next;
  }
  return sentences;
}

inline void adapt_multirc_paragraph(const nlohmann::json& para,
                                    std::size_t para_no,
                                    std::vector<QAInstance>& instances) {
  const std::string para_id = para.contains("id") && para["id"].is_string()
                                  ? para["id"].get<std::string>()
                                  : "P" + std::to_string(para_no);
  if (!para.contains("paragraph")) {
    throw DataError("paragraph " + para_id + ": missing 'paragraph'");
  }
  const auto& paragraph = para["paragraph"];
  if (!paragraph.contains("text") || !paragraph["text"].is_string()) {
    throw DataError("paragraph " + para_id + ": missing passage text");
  }
  const std::vector<std::string> sentences =
      split_passage_markup(paragraph["text"].get<std::string>());
  std::vector<CandidateText> candidates;
  candidates.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    candidates.push_back(CandidateText{i, sentences[i]});
  }
  if (!paragraph.contains("questions") || !paragraph["questions"].is_array()) {
    throw DataError("paragraph " + para_id + ": missing 'questions'");
  }
  std::size_t q_no = 0;
  for (const auto& q : paragraph["questions"]) {
    const std::string q_idx =
        q.contains("idx") ? q["idx"].dump() : std::to_string(q_no);
    if (!q.contains("question") || !q["question"].is_string()) {
      throw DataError("paragraph " + para_id + ": question without text");
    }
    std::set<std::size_t> gold;
    if (q.contains("sentences_used") && q["sentences_used"].is_array()) {
      for (const auto& g : q["sentences_used"]) {
        const std::size_t idx = g.get<std::size_t>();
        if (idx >= candidates.size()) {
          throw DataError("paragraph " + para_id + ": gold sentence " +
                          std::to_string(idx) + " out of range");
        }
        gold.insert(idx);
      }
    }
    if (!q.contains("answers") || !q["answers"].is_array()) {
      throw DataError("paragraph " + para_id + ": question without answers");
    }
    std::size_t a_no = 0;
    for (const auto& a : q["answers"]) {
      if (!a.contains("text") || !a["text"].is_string()) {
        throw DataError("paragraph " + para_id + ": answer without text");
      }
      QAInstance inst;
      inst.id = para_id + ":" + q_idx + ":" +
                (a.contains("idx") ? a["idx"].dump() : std::to_string(a_no));
      inst.question = q["question"].get<std::string>();
      inst.answer = a["text"].get<std::string>();
      if (a.contains("isAnswer") && a["isAnswer"].is_boolean()) {
        inst.label = a["isAnswer"].get<bool>() ? Label::correct : Label::incorrect;
      }
      inst.candidates = candidates;
      if (!gold.empty()) inst.gold_idxs = gold;
      instances.push_back(std::move(inst));
      ++a_no;
    }
    ++q_no;
  }
}

}  // namespace detail

// Converts the published MultiRC JSON layout into canonical instances: one
// per (question, answer-choice) pair, candidates shared across choices,
// `sentences_used` mapped to gold_idxs.
inline std::vector<QAInstance> adapt_multirc(const std::filesystem::path& raw_path) {
  std::ifstream in(raw_path);
  if (!in) throw DataError("cannot open MultiRC file: " + raw_path.string());
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid MultiRC JSON: ") + e.what());
  }
  if (!root.contains("data") || !root["data"].is_array()) {
    throw DataError("MultiRC file has no 'data' array");
  }
  std::vector<QAInstance> instances;
  std::size_t para_no = 0;
  for (const auto& para : root["data"]) {
    try {
      detail::adapt_multirc_paragraph(para, para_no, instances);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("MultiRC paragraph " + std::to_string(para_no) + ": " +
                      e.what());
    }
    ++para_no;
  }
  return instances;
}

// Converts ARC-style question JSONL (question stem + lettered choices +
// answerKey) into KB-mode instances, one per choice. ARC provides no gold
// justifications, so gold_idxs stay absent.
inline std::vector<QAInstance> adapt_arc(const std::filesystem::path& raw_path) {
  std::ifstream in(raw_path);
  if (!in) throw DataError("cannot open ARC file: " + raw_path.string());
  std::vector<QAInstance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      detail::record_error(line_no, std::string("invalid JSON: ") + e.what());
    }
    try {
      const std::string qid = detail::require_string(rec, "id", line_no);
      if (!rec.contains("question") || !rec["question"].is_object()) {
        detail::record_error(line_no, "missing field 'question'");
      }
      const auto& question = rec["question"];
      if (!question.contains("stem") || !question["stem"].is_string()) {
        detail::record_error(line_no, "missing field 'question.stem'");
      }
      if (!question.contains("choices") || !question["choices"].is_array()) {
        detail::record_error(line_no, "missing field 'question.choices'");
      }
      const std::string answer_key =
          rec.contains("answerKey") && rec["answerKey"].is_string()
              ? rec["answerKey"].get<std::string>()
              : "";
      for (const auto& choice : question["choices"]) {
        if (!choice.contains("label") || !choice.contains("text") ||
            !choice["label"].is_string() || !choice["text"].is_string()) {
          detail::record_error(line_no, "choice entries need 'label' and 'text'");
        }
        QAInstance inst;
        const std::string label = choice["label"].get<std::string>();
        inst.id = qid + ":" + label;
        inst.question = question["stem"].get<std::string>();
        inst.answer = choice["text"].get<std::string>();
        if (!answer_key.empty()) {
          inst.label = label == answer_key ? Label::correct : Label::incorrect;
        }
        instances.push_back(std::move(inst));
      }
    } catch (const nlohmann::json::exception& e) {
      detail::record_error(line_no, e.what());
    }
  }
  return instances;
}

// Text vector format: one term per line followed by its components,
// space-separated. Duplicate terms keep the first occurrence.
inline EmbeddingTable load_embeddings(const std::filesystem::path& path,
                                      std::optional<std::size_t> expected_dim = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t pos = 0;
    const auto next_field = [&]() -> std::string_view {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ') ++pos;
      return std::string_view(line).substr(start, pos - start);
    };
    const std::string_view term = next_field();
    if (term.empty()) continue;
    std::vector<float> vec;
    for (std::string_view field = next_field(); !field.empty();
         field = next_field()) {
      float value = 0.0f;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        detail::record_error(line_no, "invalid vector component '" +
                                          std::string(field) + "'");
      }
      vec.push_back(value);
    }
    if (vec.empty()) detail::record_error(line_no, "no vector components");
    if (table.dim == 0) {
      table.dim = vec.size();
      if (expected_dim && *expected_dim != table.dim) {
        detail::record_error(line_no, "dimension " + std::to_string(table.dim) +
                                          " does not match expected " +
                                          std::to_string(*expected_dim));
      }
    } else if (vec.size() != table.dim) {
      detail::record_error(line_no, "ragged row: got " +
                                        std::to_string(vec.size()) +
                                        " components, expected " +
                                        std::to_string(table.dim));
    }
    table.vectors.emplace(Token(term), std::move(vec));  // first wins
  }
  if (table.vectors.empty()) {
    throw DataError("empty embedding file: " + path.string());
  }
  return table;
}

}  // namespace rocc
