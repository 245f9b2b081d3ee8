#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rocc/datasets.hpp"

using rocc::Label;
using rocc::QAInstance;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

const char* kMultircFixture = R"({"data": [
  {"id": "Para1", "paragraph": {
    "text": "<b>Sent 1: </b>The robot checked its battery.<br><b>Sent 2: </b>It was low.<br><b>Sent 3: </b>The sky was blue.<br>",
    "questions": [
      {"question": "Why did the robot move?", "sentences_used": [0, 1], "idx": 0,
       "answers": [{"text": "battery was low", "isAnswer": true, "idx": 0},
                   {"text": "it liked the sky", "isAnswer": false, "idx": 1}]},
      {"question": "What color was the sky?", "sentences_used": [2], "idx": 1,
       "answers": [{"text": "blue", "isAnswer": true, "idx": 0},
                   {"text": "green", "isAnswer": false, "idx": 1}]}
    ]}}
]})";

}  // namespace

TEST_CASE("canonical round trip preserves instances") {
  std::vector<QAInstance> instances(2);
  instances[0].id = "q1:a";
  instances[0].question = "Which organ?";
  instances[0].answer = "liver";
  instances[0].label = Label::correct;
  instances[0].candidates = {{0, "the liver filters blood"}, {1, "the sky is blue"}};
  instances[0].gold_idxs = std::set<std::size_t>{0};
  instances[1].id = "q1:b";
  instances[1].question = "Which organ?";
  instances[1].answer = "spoon";
  instances[1].label = Label::incorrect;

  const auto path = std::filesystem::temp_directory_path() / "rocc_canon.jsonl";
  rocc::write_canonical(instances, path);
  const auto loaded = rocc::load_canonical(path);
  REQUIRE(loaded == instances);
  std::filesystem::remove(path);
}

TEST_CASE("load_canonical reads valid records in order") {
  TempFile f("rocc_ds_ok.jsonl",
             "{\"id\":\"a\",\"question\":\"Q one?\",\"answer\":\"x\"}\n"
             "{\"id\":\"b\",\"question\":\"Q two?\",\"answer\":\"y\","
             "\"label\":\"correct\"}\n");
  const auto instances = rocc::load_canonical(f.path);
  REQUIRE(instances.size() == 2);
  REQUIRE(instances[0].id == "a");
  REQUIRE(instances[1].label == Label::correct);
  REQUIRE_FALSE(instances[0].candidates.has_value());
}

TEST_CASE("load_canonical names the missing field and line") {
  TempFile f("rocc_ds_missing.jsonl", "{\"id\":\"a\",\"answer\":\"x\"}\n");
  REQUIRE_THROWS_WITH(rocc::load_canonical(f.path),
                      Catch::Matchers::ContainsSubstring("question") &&
                          Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("load_canonical rejects out-of-range gold indices") {
  TempFile f("rocc_ds_gold.jsonl",
             "{\"id\":\"a\",\"question\":\"Q?\",\"answer\":\"x\","
             "\"candidates\":[{\"idx\":0,\"text\":\"s0\"}],\"gold_idxs\":[3]}\n");
  REQUIRE_THROWS_AS(rocc::load_canonical(f.path), rocc::DataError);
}

TEST_CASE("load_canonical rejects bad JSON with the line number") {
  TempFile f("rocc_ds_badjson.jsonl",
             "{\"id\":\"a\",\"question\":\"Q?\",\"answer\":\"x\"}\n"
             "{not json}\n");
  REQUIRE_THROWS_WITH(rocc::load_canonical(f.path),
                      Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("load_canonical rejects misnumbered candidates") {
  TempFile f("rocc_ds_idx.jsonl",
             "{\"id\":\"a\",\"question\":\"Q?\",\"answer\":\"x\","
             "\"candidates\":[{\"idx\":1,\"text\":\"s\"}]}\n");
  REQUIRE_THROWS_AS(rocc::load_canonical(f.path), rocc::DataError);
}

TEST_CASE("adapt_multirc emits one instance per question-answer pair") {
  TempFile f("rocc_multirc.json", kMultircFixture);
  const auto instances = rocc::adapt_multirc(f.path);
  REQUIRE(instances.size() == 4);  // 2 questions x 2 choices

  // all instances of a paragraph share the same candidates, in document order
  REQUIRE(instances[0].candidates.has_value());
  REQUIRE(instances[0].candidates->size() == 3);
  REQUIRE((*instances[0].candidates)[0].text == "The robot checked its battery.");
  REQUIRE((*instances[0].candidates)[2].text == "The sky was blue.");
  for (const auto& inst : instances) {
    REQUIRE(*inst.candidates == *instances[0].candidates);
  }

  REQUIRE(instances[0].id == "Para1:0:0");
  REQUIRE(instances[0].question == "Why did the robot move?");
  REQUIRE(instances[0].answer == "battery was low");
  REQUIRE(instances[0].label == Label::correct);
  REQUIRE(instances[1].label == Label::incorrect);
  REQUIRE(instances[0].gold_idxs == std::set<std::size_t>{0, 1});
  REQUIRE(instances[2].gold_idxs == std::set<std::size_t>{2});
}

TEST_CASE("adapt_multirc keeps every passage sentence as a candidate") {
  std::string text;
  for (int i = 1; i <= 12; ++i) {
    text += "<b>Sent " + std::to_string(i) + ": </b>Sentence number " +
            std::to_string(i) + ".<br>";
  }
  const std::string fixture =
      std::string("{\"data\":[{\"id\":\"P\",\"paragraph\":{\"text\":\"") + text +
      "\",\"questions\":[{\"question\":\"How many?\",\"sentences_used\":[2,5],"
      "\"answers\":[{\"text\":\"twelve\",\"isAnswer\":true}]}]}}]}";
  TempFile f("rocc_multirc12.json", fixture);
  const auto instances = rocc::adapt_multirc(f.path);
  REQUIRE(instances.size() == 1);
  REQUIRE(instances[0].candidates->size() == 12);
  REQUIRE(instances[0].gold_idxs == std::set<std::size_t>{2, 5});
}

TEST_CASE("adapt_multirc rejects passages without sentence markup") {
  TempFile f("rocc_multirc_bad.json",
             R"({"data":[{"id":"P","paragraph":{"text":"no markers here",
                "questions":[]}}]})");
  REQUIRE_THROWS_AS(rocc::adapt_multirc(f.path), rocc::DataError);
}

TEST_CASE("adapt_arc emits one KB-mode instance per choice") {
  TempFile f("rocc_arc.jsonl",
             "{\"id\":\"Q7\",\"question\":{\"stem\":\"Which organ?\","
             "\"choices\":[{\"label\":\"A\",\"text\":\"liver\"},"
             "{\"label\":\"B\",\"text\":\"spoon\"},"
             "{\"label\":\"C\",\"text\":\"cloud\"},"
             "{\"label\":\"D\",\"text\":\"rock\"}]},\"answerKey\":\"A\"}\n");
  const auto instances = rocc::adapt_arc(f.path);
  REQUIRE(instances.size() == 4);
  REQUIRE(instances[0].id == "Q7:A");
  REQUIRE(instances[0].label == Label::correct);
  REQUIRE(instances[1].label == Label::incorrect);
  for (const auto& inst : instances) {
    REQUIRE_FALSE(inst.candidates.has_value());
    REQUIRE_FALSE(inst.gold_idxs.has_value());
    REQUIRE(inst.question == "Which organ?");
  }
}

TEST_CASE("load_embeddings parses the text vector format") {
  TempFile f("rocc_emb.txt",
             "liver 1.0 0.0 0.5 0.25\n"
             "organ 0.1 0.2 0.3 0.4\n"
             "spoon -1 -2 -3 -4\n");
  const auto table = rocc::load_embeddings(f.path);
  REQUIRE(table.dim == 4);
  REQUIRE(table.vectors.size() == 3);
  REQUIRE(table.find("liver") != nullptr);
  REQUIRE((*table.find("spoon"))[3] == -4.0f);
}

TEST_CASE("load_embeddings rejects ragged rows with the line number") {
  TempFile f("rocc_emb_ragged.txt",
             "liver 1.0 0.0 0.5 0.25\n"
             "organ 0.1 0.2 0.3\n");
  REQUIRE_THROWS_WITH(rocc::load_embeddings(f.path),
                      Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("load_embeddings enforces the expected dimension") {
  TempFile f("rocc_emb_dim.txt", "liver 1.0 0.0\n");
  REQUIRE_THROWS_AS(rocc::load_embeddings(f.path, 100), rocc::DataError);
  REQUIRE(rocc::load_embeddings(f.path, 2).dim == 2);
}

TEST_CASE("load_embeddings keeps the first of duplicate terms") {
  TempFile f("rocc_emb_dup.txt",
             "liver 1.0 2.0\n"
             "liver 9.0 9.0\n");
  const auto table = rocc::load_embeddings(f.path);
  REQUIRE(table.vectors.size() == 1);
  REQUIRE((*table.find("liver"))[0] == 1.0f);
}
