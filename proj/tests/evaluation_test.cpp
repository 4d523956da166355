// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <thread>

#include <doctest.h>

#include "evomerge/errors.hpp"
#include "evomerge/evaluation.hpp"

using namespace evomerge;

namespace {

SimulatedBenchmark one_item(ResponseKind kind, double t, double a = 1.0) {
  return SimulatedBenchmark({{"q", kind, t, a, 1000.0, 200.0}}, 0);
}

}  // namespace

TEST_CASE("threshold responses and length interpolation") {
  const auto up = one_item(ResponseKind::ThresholdUp, 0.3);
  CHECK(up.solves(0, 0.5));
  CHECK_FALSE(up.solves(0, 0.2));
  CHECK(up.solves(0, 0.3));
  const auto down = one_item(ResponseKind::ThresholdDown, 0.3);
  CHECK(down.solves(0, 0.2));
  CHECK_FALSE(down.solves(0, 0.5));
  CHECK(up.length(0, 0.5) == doctest::Approx(600.0));
  CHECK(up.length(0, 0.0) == 1000.0);
  CHECK(up.length(0, 1.0) == 200.0);
}

TEST_CASE("logistic response") {
  CHECK(logistic_response(10.0, 0.5, 0.5) == 0.5);
  CHECK(logistic_response(10.0, 0.5, 1e6) == doctest::Approx(1.0));
  const double oracle = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(logistic_response(4.0, 0.25, 0.75) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(logistic_response(4.0, 0.25, 0.75) == doctest::Approx(0.880797).epsilon(1e-6));

  SUBCASE("derivative is a·σ·(1 − σ)") {
    for (double lambda : {-0.3, 0.1, 0.5, 0.8}) {
      const double h = 1e-6;
      const double numeric =
          (logistic_response(6.0, 0.4, lambda + h) - logistic_response(6.0, 0.4, lambda - h)) /
          (2 * h);
      const double s = logistic_response(6.0, 0.4, lambda);
      CHECK(numeric == doctest::Approx(6.0 * s * (1 - s)).epsilon(1e-6));
    }
  }
  SUBCASE("logistic items solve at roughly the modelled rate") {
    std::vector<SimItem> items;
    for (int i = 0; i < 4000; ++i) {
      items.push_back({"l" + std::to_string(i), ResponseKind::Logistic, 0.25, 4.0, 10, 5});
    }
    const SimulatedBenchmark bench(std::move(items), 3);
    const auto acc = compute_objectives(evaluate_simulated(bench, 0.75)).accuracy;
    CHECK(acc == doctest::Approx(0.880797).epsilon(0.03));
  }
}

TEST_CASE("objectives") {
  const std::vector<ItemOutcome> o = {
      {"a", true, 100}, {"b", false, 200}, {"c", true, 300}, {"d", true, 400}};
  const auto v = compute_objectives(o);
  CHECK(v.accuracy == 0.75);
  CHECK(v.mean_length == 250.0);
  CHECK(v.fitness() == Fitness{-0.75, 250.0});
  CHECK(compute_objectives(std::vector<ItemOutcome>{{"a", true, 0}, {"b", true, 0}}) ==
        ObjectiveVector{1.0, 0.0});
  CHECK(compute_objectives(std::vector<ItemOutcome>{{"a", false, 1234}}) ==
        ObjectiveVector{0.0, 1234.0});
  CHECK_THROWS_AS(compute_objectives(std::vector<ItemOutcome>{}), InvalidArgument);

  SUBCASE("orientation") {
    const ObjectiveVector better_acc{0.8, 100}, worse_acc{0.7, 100};
    CHECK(better_acc.fitness()[0] < worse_acc.fitness()[0]);
    const ObjectiveVector shorter{0.7, 90};
    CHECK(shorter.fitness()[1] < worse_acc.fitness()[1]);
  }
}

TEST_CASE("generated benchmark") {
  const auto a = generate_benchmark(0);
  const auto b = generate_benchmark(0);
  CHECK(a.size() == 1000);
  CHECK(a.items() == b.items());
  CHECK(a.items().front().item_id == "sim-0000");
  CHECK(generate_benchmark(1).items() != a.items());
  int up = 0, down = 0, logistic = 0;
  for (const auto& item : a.items()) {
    (item.response_kind == ResponseKind::ThresholdUp     ? up
     : item.response_kind == ResponseKind::ThresholdDown ? down
                                                         : logistic)++;
    CHECK(item.len_long >= item.len_short);
  }
  CHECK(up == 450);
  CHECK(down == 450);
  CHECK(logistic == 100);
  CHECK(a.max_length() <= 6000.0);
}

TEST_CASE("simulated evaluation is deterministic across threads") {
  const auto bench = generate_benchmark(4);
  const SimulatedEvaluator eval(bench);
  const Genotype g{MergeKind::TA, {0.4321}};
  const auto reference = eval.evaluate(g, {});
  std::vector<std::vector<ItemOutcome>> results(4);
  {
    std::vector<std::jthread> threads;
    for (auto& r : results) threads.emplace_back([&] { r = eval.evaluate(g, {}); });
  }
  for (const auto& r : results) CHECK(r == reference);
  CHECK_THROWS_AS(eval.evaluate({MergeKind::TIES, {0.5, 1.0}}, {}), InvalidArgument);

  const std::vector<std::string> subset = {"sim-0010", "sim-0003"};
  const auto part = eval.evaluate(g, subset);
  REQUIRE(part.size() == 2);
  CHECK(part[0] == reference[10]);
  CHECK(part[1] == reference[3]);
}

TEST_CASE("record parsing") {
  const auto records = parse_record_evaluations(
      "{\"candidate_id\":\"m0\",\"item_id\":\"q1\",\"correct\":1,\"length\":10}\n"
      "\n"
      "{\"candidate_id\":\"m0\",\"item_id\":\"q2\",\"correct\":false,\"length\":20.5}\n");
  REQUIRE(records.size() == 1);
  CHECK(records.at("m0") ==
        std::vector<ItemOutcome>{{"q1", true, 10.0}, {"q2", false, 20.5}});

  const auto message = [](std::string_view text) {
    try {
      parse_record_evaluations(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const auto dup = message(
      "{\"candidate_id\":\"m0\",\"item_id\":\"q1\",\"correct\":1,\"length\":1}\n"
      "{\"candidate_id\":\"m0\",\"item_id\":\"q1\",\"correct\":0,\"length\":1}\n");
  CHECK(dup.find("line 2") != std::string::npos);
  CHECK(dup.find("'m0'") != std::string::npos);
  CHECK(dup.find("'q1'") != std::string::npos);
  CHECK(message("{\"candidate_id\":\"m0\",\"item_id\":\"q1\",\"correct\":2,\"length\":1}")
            .find("0/1") != std::string::npos);
  CHECK(message("{\"candidate_id\":\"m0\",\"item_id\":\"q1\",\"length\":1}").find("correct") !=
        std::string::npos);
  CHECK(message("not json").find("line 1") != std::string::npos);
}

TEST_CASE("record evaluator") {
  const RecordEvaluator eval(parse_record_evaluations(
      "{\"candidate_id\":\"ta:0.5\",\"item_id\":\"q1\",\"correct\":1,\"length\":10}\n"
      "{\"candidate_id\":\"ta:0.5\",\"item_id\":\"q2\",\"correct\":0,\"length\":30}\n"
      "{\"candidate_id\":\"ta:1\",\"item_id\":\"q1\",\"correct\":1,\"length\":5}\n"));
  CHECK(eval.item_ids() == std::vector<std::string>{"q1", "q2"});
  CHECK(compute_objectives(eval.evaluate({MergeKind::TA, {0.5}}, {})) == ObjectiveVector{0.5, 20});
  CHECK_THROWS_AS(eval.evaluate({MergeKind::TA, {0.25}}, {}), MissingCandidate);
  try {
    eval.evaluate({MergeKind::TA, {1.0}}, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(candidate 'ta:1', item 'q2')") != std::string::npos);
  }
}
