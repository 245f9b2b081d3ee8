// Command-line front end: index a sentence KB, select justification sets,
// evaluate them against gold annotations, and sweep ablations.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rocc/rocc.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonFlags {
  // tokenizer
  bool no_lowercase = false;
  std::string stopwords_path;
  std::size_t min_token_len = 1;
  // bm25
  double k1 = 1.2;
  double b = 0.75;
  bool count_duplicate_query_terms = false;
  // rocc
  double epsilon = 1.0;
  std::vector<std::string> ablate;
  std::string align_path;
  double threshold = 0.95;
  bool unordered_overlap = false;
  // selection
  std::string mode = "passage";
  std::size_t n = 20;
  std::vector<std::size_t> k_list;
  std::string k_range;
  bool auto_k = false;
  std::size_t beam = 0;
  std::size_t top_m = 1;
  bool allow_singletons = false;
  // execution
  std::size_t workers = 1;
  std::string index_path;
  std::string kb_path;
};

void add_tokenizer_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_flag("--no-lowercase", f.no_lowercase, "Keep the original case");
  cmd->add_option("--stopwords", f.stopwords_path,
                  "Stopword file, one term per line");
  cmd->add_option("--min-token-len", f.min_token_len,
                  "Minimum token length in code points");
}

void add_select_flags(CLI::App* cmd, CommonFlags& f, bool with_ablate) {
  add_tokenizer_flags(cmd, f);
  cmd->add_option("--mode", f.mode, "Candidate source: passage or kb")
      ->check(CLI::IsMember({"passage", "kb"}));
  cmd->add_option("--index", f.index_path, "Index cache file (kb mode)");
  cmd->add_option("--kb", f.kb_path, "KB text file, one sentence per line "
                                     "(kb mode; built on the fly)");
  cmd->add_option("--n", f.n, "Retrieval depth in kb mode");
  cmd->add_option("--k", f.k_list, "Set size(s); repeatable");
  cmd->add_option("--k-range", f.k_range, "Inclusive size range, e.g. 2..6");
  cmd->add_flag("--auto", f.auto_k,
                "Rank all sizes together and take the global best");
  cmd->add_option("--k1", f.k1, "BM25 k1");
  cmd->add_option("--b", f.b, "BM25 b");
  cmd->add_flag("--count-duplicate-query-terms", f.count_duplicate_query_terms,
                "Let repeated query tokens contribute repeatedly to BM25");
  cmd->add_option("--epsilon", f.epsilon, "Additive smoothing constant");
  if (with_ablate) {
    cmd->add_option("--ablate", f.ablate,
                    "Score components to remove: no_idf, no_c_answer, "
                    "no_c_question, no_overlap, r_only")
        ->check(CLI::IsMember({"no_idf", "no_c_answer", "no_c_question",
                               "no_overlap", "r_only"}));
  }
  cmd->add_option("--align", f.align_path,
                  "Embedding file enabling soft term matching");
  cmd->add_option("--threshold", f.threshold,
                  "Cosine threshold for the alignment matcher");
  cmd->add_flag("--unordered-overlap", f.unordered_overlap,
                "Count each sentence pair once in the overlap score");
  cmd->add_option("--beam", f.beam, "Beam width (0 = exhaustive)");
  cmd->add_option("--top-m", f.top_m, "Also report this many runner-up sets");
  cmd->add_flag("--allow-singletons", f.allow_singletons,
                "Permit k = 1 for diagnostics");
  cmd->add_option("--workers", f.workers, "Instance-level worker threads");
}

// Defaults may come from a JSON config file named by --config or the
// ROCC_CONFIG environment variable; explicit flags win.
void apply_config_file(const CLI::App& cmd, const std::string& path,
                       CommonFlags& f) {
  std::ifstream in(path);
  if (!in) throw rocc::ConfigError("cannot open config file: " + path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw rocc::ConfigError("invalid config file: " + std::string(e.what()));
  }
  const auto unset = [&](const char* flag) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  const auto load = [&](const char* key, const char* flag, auto& target) {
    if (cfg.contains(key) && unset(flag)) {
      cfg.at(key).get_to(target);
    }
  };
  load("k1", "--k1", f.k1);
  load("b", "--b", f.b);
  load("epsilon", "--epsilon", f.epsilon);
  load("n", "--n", f.n);
  load("threshold", "--threshold", f.threshold);
  load("min_token_len", "--min-token-len", f.min_token_len);
  load("workers", "--workers", f.workers);
  load("stopwords", "--stopwords", f.stopwords_path);
}

struct ResolvedRun {
  rocc::TokenizerConfig tokenizer;
  rocc::Bm25Params bm25;
  rocc::RoccConfig rocc_cfg;
  rocc::SelectionConfig selection;
  rocc::DatasetMode dataset_mode;
  std::optional<rocc::Index> index;
};

std::vector<std::size_t> parse_k_values(const CommonFlags& f) {
  std::vector<std::size_t> ks = f.k_list;
  if (!f.k_range.empty()) {
    const std::size_t dots = f.k_range.find("..");
    if (dots == std::string::npos) {
      throw rocc::ConfigError("--k-range expects the form A..B");
    }
    std::size_t lo = 0, hi = 0;
    try {
      lo = std::stoull(f.k_range.substr(0, dots));
      hi = std::stoull(f.k_range.substr(dots + 2));
    } catch (const std::exception&) {
      throw rocc::ConfigError("--k-range expects numeric bounds");
    }
    if (lo > hi) throw rocc::ConfigError("--k-range bounds are reversed");
    for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
  }
  if (ks.empty()) throw rocc::ConfigError("give a set size via --k or --k-range");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.size() > 1 && !f.auto_k) {
    throw rocc::ConfigError("multiple set sizes need --auto");
  }
  return ks;
}

std::vector<rocc::Sentence> read_kb_sentences(const std::filesystem::path& path,
                                              const rocc::TokenizerConfig& cfg,
                                              std::size_t* skipped_out) {
  std::ifstream in(path);
  if (!in) throw rocc::DataError("cannot open KB file: " + path.string());
  std::vector<rocc::Sentence> sentences;
  std::string line;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rocc::Sentence s = rocc::Sentence::make(sentences.size(), line, cfg);
    if (s.tokens.empty()) {
      ++skipped;  // blank or punctuation-only line
      continue;
    }
    sentences.push_back(std::move(s));
  }
  if (sentences.empty()) throw rocc::DataError("KB has no usable sentences");
  if (skipped_out) *skipped_out = skipped;
  return sentences;
}

ResolvedRun resolve_run(const CommonFlags& f) {
  ResolvedRun run;
  run.tokenizer.lowercase = !f.no_lowercase;
  run.tokenizer.min_token_len = f.min_token_len;
  if (!f.stopwords_path.empty()) {
    run.tokenizer.stopwords =
        rocc::load_stopwords(f.stopwords_path, run.tokenizer.lowercase);
  }
  run.tokenizer.validate();
  run.bm25.k1 = f.k1;
  run.bm25.b = f.b;
  run.bm25.unique_query_terms = !f.count_duplicate_query_terms;
  run.bm25.validate();
  run.rocc_cfg.epsilon = f.epsilon;
  run.rocc_cfg.unordered_overlap = f.unordered_overlap;
  for (const std::string& a : f.ablate) {
    if (a == "no_idf") run.rocc_cfg.ablation.no_idf = true;
    if (a == "no_c_answer") run.rocc_cfg.ablation.no_c_answer = true;
    if (a == "no_c_question") run.rocc_cfg.ablation.no_c_question = true;
    if (a == "no_overlap") run.rocc_cfg.ablation.no_overlap = true;
    if (a == "r_only") run.rocc_cfg.ablation.r_only = true;
  }
  if (!f.align_path.empty()) {
    auto table = std::make_shared<rocc::EmbeddingTable>(
        rocc::load_embeddings(f.align_path));
    run.rocc_cfg.alignment = rocc::AlignmentConfig{f.threshold, std::move(table)};
  }
  run.rocc_cfg.validate();
  run.selection.n = f.n;
  run.selection.k_values = parse_k_values(f);
  run.selection.mode =
      f.auto_k ? rocc::SelectionMode::auto_k : rocc::SelectionMode::parametric;
  run.selection.opts.beam_width = f.beam;
  run.selection.opts.top_m = std::max<std::size_t>(1, f.top_m);
  run.selection.opts.allow_singletons = f.allow_singletons;
  if (f.mode == "kb") {
    run.dataset_mode.kind = rocc::DatasetMode::Kind::kb;
    run.selection.reorder_by_index = false;
    if (!f.index_path.empty()) {
      run.index = rocc::Index::load(f.index_path);
    } else if (!f.kb_path.empty()) {
      run.dataset_mode.kb_path = f.kb_path;
      run.index = rocc::Index::build(
          read_kb_sentences(f.kb_path, run.tokenizer, nullptr), run.tokenizer);
    } else {
      throw rocc::ConfigError("kb mode needs --index or --kb");
    }
  } else {
    run.dataset_mode.kind = rocc::DatasetMode::Kind::passage;
    run.selection.reorder_by_index = true;
  }
  run.selection.validate();
  return run;
}

ordered_json config_json(const CommonFlags& f, const ResolvedRun& run,
                         const std::string& command) {
  ordered_json cfg;
  cfg["command"] = command;
  cfg["mode"] = f.mode;
  cfg["tokenizer"] = {{"lowercase", run.tokenizer.lowercase},
                      {"min_token_len", run.tokenizer.min_token_len},
                      {"stopwords", f.stopwords_path}};
  cfg["bm25"] = {{"k1", run.bm25.k1},
                 {"b", run.bm25.b},
                 {"unique_query_terms", run.bm25.unique_query_terms}};
  ordered_json ablation = ordered_json::array();
  for (const std::string& a : f.ablate) ablation.push_back(a);
  cfg["rocc"] = {{"epsilon", run.rocc_cfg.epsilon},
                 {"ablation", ablation},
                 {"unordered_overlap", run.rocc_cfg.unordered_overlap}};
  if (run.rocc_cfg.alignment) {
    cfg["rocc"]["alignment"] = {{"path", f.align_path},
                                {"threshold", run.rocc_cfg.alignment->threshold}};
  } else {
    cfg["rocc"]["alignment"] = nullptr;
  }
  cfg["selection"] = {
      {"mode", run.selection.mode == rocc::SelectionMode::auto_k ? "auto"
                                                                 : "parametric"},
      {"n", run.selection.n},
      {"k_values", run.selection.k_values},
      {"reorder_by_index", run.selection.reorder_by_index},
      {"beam_width", run.selection.opts.beam_width},
      {"top_m", run.selection.opts.top_m},
      {"allow_singletons", run.selection.opts.allow_singletons}};
  if (!f.index_path.empty()) cfg["index"] = f.index_path;
  if (!f.kb_path.empty()) cfg["kb"] = f.kb_path;
  return cfg;
}

ordered_json breakdown_json(const rocc::ScoreBreakdown& b) {
  return {{"r", b.r}, {"o", b.o}, {"c_q", b.c_q}, {"c_a", b.c_a}, {"s", b.s}};
}

ordered_json record_json(const rocc::SelectionRecord& rec, bool passage_mode) {
  ordered_json j;
  j["type"] = "selection";
  j["id"] = rec.id;
  j["ok"] = rec.ok;
  if (!rec.ok) {
    j["error"] = rec.error;
    return j;
  }
  j["k"] = rec.k;
  j["k_values_used"] = rec.k_values_used;
  j["predicted_idxs"] = rec.predicted_idxs;
  j["order"] = rec.display_order;
  j["breakdown"] = breakdown_json(rec.breakdown);
  if (passage_mode) {
    j["justification_text"] = rec.justification_text;
  } else {
    ordered_json sentences = ordered_json::array();
    for (const auto& s : rec.sentences) {
      sentences.push_back({{"idx", s.idx}, {"text", s.text}, {"bm25", s.bm25}});
    }
    j["sentences"] = std::move(sentences);
  }
  if (!rec.runners_up.empty()) {
    ordered_json runners = ordered_json::array();
    for (const auto& ru : rec.runners_up) {
      runners.push_back({{"idxs", ru.idxs},
                         {"k", ru.k},
                         {"breakdown", breakdown_json(ru.breakdown)}});
    }
    j["runners_up"] = std::move(runners);
  }
  return j;
}

// Instance-level parallelism; results land in input order regardless of the
// worker count.
std::vector<rocc::SelectionRecord> run_batch(
    const std::vector<rocc::QAInstance>& instances, const ResolvedRun& run,
    std::size_t workers) {
  std::vector<rocc::SelectionRecord> records(instances.size());
  const auto select_one = [&](std::size_t i) {
    if (run.dataset_mode.kind == rocc::DatasetMode::Kind::passage) {
      records[i] = rocc::select_passage_instance(
          instances[i], run.tokenizer, run.bm25, run.rocc_cfg, run.selection);
    } else {
      records[i] = rocc::select_kb_instance(instances[i], *run.index, run.bm25,
                                            run.rocc_cfg, run.selection);
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) select_one(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < instances.size();
           i = next.fetch_add(1)) {
        select_one(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return records;
}

int cmd_index(const std::string& kb_path, const std::string& out_path,
              const CommonFlags& f) {
  rocc::TokenizerConfig cfg;
  cfg.lowercase = !f.no_lowercase;
  cfg.min_token_len = f.min_token_len;
  if (!f.stopwords_path.empty()) {
    cfg.stopwords = rocc::load_stopwords(f.stopwords_path, cfg.lowercase);
  }
  cfg.validate();
  std::size_t skipped = 0;
  auto sentences = read_kb_sentences(kb_path, cfg, &skipped);
  const rocc::Index index = rocc::Index::build(std::move(sentences), cfg);
  index.save(out_path);
  std::cout << "indexed " << index.sentences().size() << " sentences ("
            << skipped << " unusable lines skipped) -> " << out_path << "\n";
  return 0;
}

int cmd_select(const std::string& dataset_path, const std::string& out_path,
               const CommonFlags& f) {
  const ResolvedRun run = resolve_run(f);
  const auto instances = rocc::load_canonical(dataset_path);
  const auto records = run_batch(instances, run, f.workers);
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw rocc::DataError("cannot open output: " + out_path);
  ordered_json header;
  header["type"] = "header";
  header["version"] = rocc::kVersion;
  header["config"] = config_json(f, run, "select");
  header["dataset"] = dataset_path;
  out << header.dump() << '\n';
  const bool passage = run.dataset_mode.kind == rocc::DatasetMode::Kind::passage;
  std::size_t failures = 0;
  for (const auto& rec : records) {
    if (!rec.ok) ++failures;
    out << record_json(rec, passage).dump() << '\n';
  }
  if (!out) throw rocc::DataError("failed writing: " + out_path);
  std::cout << "selected for " << records.size() - failures << "/"
            << records.size() << " instances -> " << out_path << "\n";
  return 0;
}

struct LoadedSelections {
  std::vector<rocc::SelectionRecord> records;
  std::size_t failed = 0;
};

LoadedSelections load_selections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw rocc::DataError("cannot open selections: " + path.string());
  LoadedSelections out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw rocc::DataError("selections line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    if (rec.value("type", "") != "selection") continue;
    try {
      rocc::SelectionRecord r;
      r.id = rec.at("id").get<std::string>();
      r.ok = rec.value("ok", false);
      if (!r.ok) {
        ++out.failed;
        continue;
      }
      r.predicted_idxs = rec.at("predicted_idxs").get<std::vector<std::size_t>>();
      r.k = rec.value("k", r.predicted_idxs.size());
      if (rec.contains("breakdown")) {
        const auto& b = rec["breakdown"];
        r.breakdown.r = b.value("r", 0.0);
        r.breakdown.o = b.value("o", 0.0);
        r.breakdown.c_q = b.value("c_q", 0.0);
        r.breakdown.c_a = b.value("c_a", 0.0);
        r.breakdown.s = b.value("s", 0.0);
      }
      out.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw rocc::DataError("selections line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return out;
}

ordered_json metrics_json(const rocc::JustificationMetrics& m) {
  ordered_json j;
  j["micro"] = {{"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1}};
  j["macro"] = {{"precision", m.macro_precision},
                {"recall", m.macro_recall},
                {"f1", m.macro_f1}};
  j["n_scored"] = m.n_scored;
  j["n_skipped"] = m.n_skipped;
  return j;
}

int cmd_eval(const std::string& selections_path, const std::string& dataset_path,
             const std::string& out_path, bool correct_only) {
  const LoadedSelections sel = load_selections(selections_path);
  const auto instances = rocc::load_canonical(dataset_path);
  const auto inputs =
      rocc::join_for_eval(sel.records, instances, correct_only);
  const rocc::JustificationMetrics m = rocc::aggregate(inputs);
  ordered_json report;
  report["type"] = "eval_report";
  report["version"] = rocc::kVersion;
  report["selections"] = selections_path;
  report["dataset"] = dataset_path;
  report["correct_only"] = correct_only;
  report["failed_selections"] = sel.failed;
  report.update(metrics_json(m));
  std::unordered_map<std::string_view, const rocc::SelectionRecord*> by_id;
  for (const auto& r : sel.records) by_id.emplace(r.id, &r);
  ordered_json per_q = ordered_json::array();
  for (const auto& q : m.per_question) {
    ordered_json row = {{"id", q.id},
                        {"p", q.score.p},
                        {"r", q.score.r},
                        {"f1", q.score.f1},
                        {"n_pred", q.n_pred},
                        {"n_gold", q.n_gold},
                        {"n_inter", q.n_inter}};
    if (const auto it = by_id.find(q.id); it != by_id.end()) {
      row["k"] = it->second->k;
      row["predicted_idxs"] = it->second->predicted_idxs;
      row["breakdown"] = breakdown_json(it->second->breakdown);
    }
    per_q.push_back(std::move(row));
  }
  report["per_question"] = std::move(per_q);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw rocc::DataError("cannot open output: " + out_path);
    out << report.dump(2) << '\n';
  }
  std::cout << "scored " << m.n_scored << " instances (" << m.n_skipped
            << " without gold skipped";
  if (sel.failed > 0) std::cout << ", " << sel.failed << " failed selections";
  std::cout << ")\n";
  std::cout << "micro  P " << 100.0 * m.precision << "  R " << 100.0 * m.recall
            << "  F1 " << 100.0 * m.f1 << "\n";
  std::cout << "macro  P " << 100.0 * m.macro_precision << "  R "
            << 100.0 * m.macro_recall << "  F1 " << 100.0 * m.macro_f1 << "\n";
  return 0;
}

int cmd_ablate(const std::string& dataset_path, const std::string& out_path,
               CommonFlags f, bool correct_only) {
  const auto instances = rocc::load_canonical(dataset_path);
  const std::vector<std::string> modes = {"full",          "no_idf",
                                          "no_c_answer",   "no_c_question",
                                          "no_overlap",    "r_only"};
  ordered_json rows = ordered_json::array();
  std::cout << "ablation          P       R       F1\n";
  for (const std::string& mode : modes) {
    f.ablate.clear();
    if (mode != "full") f.ablate.push_back(mode);
    const ResolvedRun run = resolve_run(f);
    const auto records = run_batch(instances, run, f.workers);
    const auto inputs = rocc::join_for_eval(records, instances, correct_only);
    const rocc::JustificationMetrics m = rocc::aggregate(inputs);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-14s %6.2f  %6.2f  %6.2f\n", mode.c_str(),
                  100.0 * m.precision, 100.0 * m.recall, 100.0 * m.f1);
    std::cout << buf;
    ordered_json row;
    row["mode"] = mode;
    row.update(metrics_json(m));
    rows.push_back(std::move(row));
  }
  if (!out_path.empty()) {
    ordered_json report;
    report["type"] = "ablation_report";
    report["version"] = rocc::kVersion;
    report["dataset"] = dataset_path;
    {
      f.ablate.clear();
      const ResolvedRun run = resolve_run(f);
      report["config"] = config_json(f, run, "ablate");
    }
    report["rows"] = std::move(rows);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw rocc::DataError("cannot open output: " + out_path);
    out << report.dump(2) << '\n';
  }
  return 0;
}

int cmd_adapt(const std::string& flavor, const std::string& raw_path,
              const std::string& out_path) {
  std::vector<rocc::QAInstance> instances;
  if (flavor == "multirc") {
    instances = rocc::adapt_multirc(raw_path);
  } else if (flavor == "arc") {
    instances = rocc::adapt_arc(raw_path);
  } else {
    throw rocc::ConfigError("unknown adapter: " + flavor);
  }
  rocc::write_canonical(instances, out_path);
  std::cout << "wrote " << instances.size() << " instances -> " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised justification sentence selection"};
  app.set_version_flag("--version", rocc::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  if (const char* env = std::getenv("ROCC_CONFIG")) config_path = env;
  app.add_option("--config", config_path,
                 "JSON config file with flag defaults (env: ROCC_CONFIG)");

  CommonFlags flags;

  auto* index_cmd = app.add_subcommand("index", "Build and persist a KB index");
  std::string kb_path, index_out;
  index_cmd->add_option("kb", kb_path, "KB text file, one sentence per line")
      ->required();
  index_cmd->add_option("-o,--out", index_out, "Index cache path")->required();
  add_tokenizer_flags(index_cmd, flags);

  auto* select_cmd =
      app.add_subcommand("select", "Select justification sets per instance");
  std::string dataset_path, select_out;
  select_cmd->add_option("dataset", dataset_path, "Canonical dataset (JSONL)")
      ->required();
  select_cmd->add_option("-o,--out", select_out, "Selections output (JSONL)")
      ->required();
  add_select_flags(select_cmd, flags, true);

  auto* eval_cmd =
      app.add_subcommand("eval", "Score selections against gold justifications");
  std::string selections_path, eval_dataset, eval_out;
  bool correct_only = false;
  eval_cmd->add_option("selections", selections_path, "Selections file")
      ->required();
  eval_cmd->add_option("dataset", eval_dataset, "Canonical dataset with gold")
      ->required();
  eval_cmd->add_option("-o,--out", eval_out, "Report output (JSON)");
  eval_cmd->add_flag("--correct-only", correct_only,
                     "Score only instances labeled correct");

  auto* ablate_cmd =
      app.add_subcommand("ablate", "Run the component-removal matrix");
  std::string ablate_dataset, ablate_out;
  bool ablate_correct_only = false;
  ablate_cmd->add_option("dataset", ablate_dataset, "Canonical dataset with gold")
      ->required();
  ablate_cmd->add_option("-o,--out", ablate_out, "Report output (JSON)");
  ablate_cmd->add_flag("--correct-only", ablate_correct_only,
                       "Score only instances labeled correct");
  add_select_flags(ablate_cmd, flags, false);

  auto* adapt_cmd =
      app.add_subcommand("adapt", "Convert a source dataset to canonical JSONL");
  std::string adapt_flavor, adapt_raw, adapt_out;
  adapt_cmd->add_option("flavor", adapt_flavor, "multirc or arc")
      ->required()
      ->check(CLI::IsMember({"multirc", "arc"}));
  adapt_cmd->add_option("raw", adapt_raw, "Source dataset file")->required();
  adapt_cmd->add_option("out", adapt_out, "Canonical output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) {
      const CLI::App* sub = app.get_subcommands().front();
      apply_config_file(*sub, config_path, flags);
    }
    if (index_cmd->parsed()) return cmd_index(kb_path, index_out, flags);
    if (select_cmd->parsed()) return cmd_select(dataset_path, select_out, flags);
    if (eval_cmd->parsed()) {
      return cmd_eval(selections_path, eval_dataset, eval_out, correct_only);
    }
    if (ablate_cmd->parsed()) {
      return cmd_ablate(ablate_dataset, ablate_out, flags, ablate_correct_only);
    }
    if (adapt_cmd->parsed()) return cmd_adapt(adapt_flavor, adapt_raw, adapt_out);
    return 1;
  } catch (const rocc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rocc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
