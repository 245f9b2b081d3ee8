#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "rocc/eval.hpp"

using rocc::EvalInput;
using rocc::JustificationMetrics;
using rocc::PrfScore;

TEST_CASE("prf_single hand-evaluated values") {
  SECTION("exact match") {
    const PrfScore s = rocc::prf_single({1, 3}, {1, 3});
    REQUIRE(s.p == 1.0);
    REQUIRE(s.r == 1.0);
    REQUIRE(s.f1 == 1.0);
  }
  SECTION("disjoint prediction") {
    const PrfScore s = rocc::prf_single({2, 4}, {1, 3});
    REQUIRE(s.p == 0.0);
    REQUIRE(s.r == 0.0);
    REQUIRE(s.f1 == 0.0);
  }
  SECTION("two of three correct") {
    const PrfScore s = rocc::prf_single({1, 2, 4}, {1, 2, 3});
    REQUIRE(s.p == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    REQUIRE(s.r == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    REQUIRE(s.f1 == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SECTION("empty prediction") {
    const PrfScore s = rocc::prf_single({}, {1});
    REQUIRE(s.p == 0.0);
    REQUIRE(s.r == 0.0);
    REQUIRE(s.f1 == 0.0);
  }
}

TEST_CASE("prf_single is invariant under index relabeling") {
  std::mt19937 rng(11);
  for (int round = 0; round < 300; ++round) {
    std::set<std::size_t> pred, gold;
    for (std::size_t i = 0; i < 1 + rng() % 5; ++i) pred.insert(rng() % 10);
    for (std::size_t i = 0; i < 1 + rng() % 5; ++i) gold.insert(rng() % 10);
    const PrfScore a = rocc::prf_single(pred, gold);
    std::set<std::size_t> pred2, gold2;
    for (const auto v : pred) pred2.insert(v * 7 + 100);
    for (const auto v : gold) gold2.insert(v * 7 + 100);
    const PrfScore b = rocc::prf_single(pred2, gold2);
    REQUIRE(a.p == b.p);
    REQUIRE(a.r == b.r);
    REQUIRE(a.f1 == b.f1);
  }
}

TEST_CASE("aggregate over one instance equals prf_single") {
  const std::vector<EvalInput> inputs = {{"q1", {1, 2, 4}, {1, 2, 3}}};
  const JustificationMetrics m = rocc::aggregate(inputs);
  const PrfScore s = rocc::prf_single({1, 2, 4}, {1, 2, 3});
  REQUIRE(m.precision == s.p);
  REQUIRE(m.recall == s.r);
  REQUIRE(m.f1 == s.f1);
  REQUIRE(m.macro_f1 == s.f1);
  REQUIRE(m.n_scored == 1);
}

TEST_CASE("micro F1 is the harmonic mean of micro P and R") {
  // Two instances whose micro sums come out to P = 0.482 and R = 0.682
  // exactly; the harmonic mean then lands within 0.1 of 56.4.
  const auto make_input = [](std::size_t base, const std::string& id) {
    EvalInput input;
    input.id = id;
    for (std::size_t i = 0; i < 170500; ++i) input.predicted.insert(base + i);
    for (std::size_t i = 0; i < 82181; ++i) input.gold.insert(base + i);
    for (std::size_t i = 0; i < 38319; ++i) input.gold.insert(base + 600000 + i);
    return input;
  };
  const std::vector<EvalInput> inputs = {make_input(0, "a"),
                                         make_input(1000000, "b")};
  const JustificationMetrics m = rocc::aggregate(inputs);
  REQUIRE(m.precision == Catch::Approx(0.482).epsilon(1e-12));
  REQUIRE(m.recall == Catch::Approx(0.682).epsilon(1e-12));
  REQUIRE(m.f1 == 2.0 * m.precision * m.recall / (m.precision + m.recall));
  REQUIRE(100.0 * m.f1 == Catch::Approx(56.4).margin(0.1));
}

TEST_CASE("aggregate matches a hand recount over several instances") {
  const std::vector<EvalInput> inputs = {
      {"a", {0, 1}, {0, 1}},        // inter 2, pred 2, gold 2
      {"b", {0, 1, 2}, {3, 4}},     // inter 0, pred 3, gold 2
      {"c", {5}, {5, 6, 7}},        // inter 1, pred 1, gold 3
      {"d", {8, 9, 10, 11}, {8}},   // inter 1, pred 4, gold 1
      {"e", {12, 13}, {13, 14}},    // inter 1, pred 2, gold 2
  };
  const JustificationMetrics m = rocc::aggregate(inputs);
  REQUIRE(m.precision == Catch::Approx(5.0 / 12.0).epsilon(1e-12));
  REQUIRE(m.recall == Catch::Approx(5.0 / 10.0).epsilon(1e-12));
  const double f1 = 2.0 * (5.0 / 12.0) * 0.5 / ((5.0 / 12.0) + 0.5);
  REQUIRE(m.f1 == Catch::Approx(f1).epsilon(1e-12));
  REQUIRE(m.per_question.size() == 5);
  REQUIRE(m.per_question[2].n_inter == 1);
}

TEST_CASE("instances without gold are skipped and counted") {
  const std::vector<EvalInput> inputs = {
      {"a", {0}, {0}},
      {"no-gold", {1, 2}, {}},
  };
  const JustificationMetrics m = rocc::aggregate(inputs);
  REQUIRE(m.n_scored == 1);
  REQUIRE(m.n_skipped == 1);
  REQUIRE(m.precision == 1.0);
}

TEST_CASE("aggregate with nothing scorable is an error") {
  const std::vector<EvalInput> inputs = {{"a", {1}, {}}};
  REQUIRE_THROWS_AS(rocc::aggregate(inputs), rocc::DataError);
}

TEST_CASE("predicting every candidate yields recall 1") {
  std::mt19937 rng(77);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 1 + rng() % 15;
    std::set<std::size_t> all;
    for (std::size_t i = 0; i < n; ++i) all.insert(i);
    std::set<std::size_t> gold;
    for (std::size_t i = 0; i < 1 + rng() % n; ++i) gold.insert(rng() % n);
    const PrfScore s = rocc::prf_single(all, gold);
    REQUIRE(s.r == 1.0);
  }
}
