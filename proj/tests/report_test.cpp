// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <doctest.h>

#include "evomerge/errors.hpp"
#include "evomerge/report.hpp"

using namespace evomerge;

namespace {

std::vector<ItemOutcome> outcomes(std::size_t n, std::size_t correct, double length) {
  std::vector<ItemOutcome> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"q" + std::to_string(i), i < correct, length});
  return out;
}

}  // namespace

TEST_CASE("length reduction") {
  CHECK(length_reduction_percent(500, 1000) == 50.0);
  CHECK(length_reduction_percent(1242, 1000) == doctest::Approx(-24.2));
  CHECK_THROWS_AS(length_reduction_percent(10, 0), InvalidArgument);
}

TEST_CASE("single benchmark") {
  const auto r = build_report({{"gsm8k", outcomes(10, 7, 500)}}, {{"gsm8k", outcomes(10, 8, 1000)}});
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].accuracy == doctest::Approx(0.7));
  CHECK(r.rows[0].length_reduction == doctest::Approx(50.0));
  CHECK(r.length_reduction == doctest::Approx(50.0));
}

TEST_CASE("weighted average") {
  const auto r = build_report({{"aime", outcomes(30, 12, 100)}, {"gsm8k", outcomes(1319, 1055, 100)}},
                              {{"aime", outcomes(30, 0, 200)}, {"gsm8k", outcomes(1319, 0, 200)}});
  const double expected = (12.0 + 1055.0) / 1349.0;
  CHECK(r.weighted_average == doctest::Approx(expected));
  CHECK(r.average == doctest::Approx((0.4 + 1055.0 / 1319.0) / 2));
  const std::vector<BenchmarkRow> rows = {{"a", 30, 0.4, 0, 0, 0}, {"b", 1319, 0.8, 0, 0, 0}};
  CHECK(weighted_accuracy(rows) == doctest::Approx((0.4 * 30 + 0.8 * 1319) / 1349));
  CHECK(std::abs(weighted_accuracy(rows) - 0.7911) < 5e-5);
  CHECK(mean_accuracy(rows) == doctest::Approx(0.6));
}

TEST_CASE("negative reduction when longer than the baseline") {
  const auto r = build_report({{"math", outcomes(4, 2, 1242)}}, {{"math", outcomes(4, 2, 1000)}});
  CHECK(r.rows[0].length_reduction == doctest::Approx(-24.2));
  CHECK(report_csv(r).find("-24.2000") != std::string::npos);
  CHECK(report_text(r).find("-24.2") != std::string::npos);
}

TEST_CASE("weighted average equals pooled accuracy") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> size(1, 300);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, std::vector<ItemOutcome>> groups, base;
    std::size_t solved = 0, total = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t n = size(rng);
      const std::size_t c = std::uniform_int_distribution<std::size_t>(0, n)(rng);
      groups["b" + std::to_string(b)] = outcomes(n, c, 10);
      base["b" + std::to_string(b)] = outcomes(n, 0, 20);
      solved += c;
      total += n;
    }
    REQUIRE(build_report(groups, base).weighted_average ==
            doctest::Approx(double(solved) / double(total)).epsilon(1e-12));
  }
}

TEST_CASE("report errors and CSV layout") {
  CHECK_THROWS_AS(build_report({{"a", outcomes(2, 1, 1)}}, {{"b", outcomes(2, 1, 1)}}),
                  InvalidArgument);
  CHECK_THROWS_AS(build_report({{"a", {}}}, {{"a", outcomes(2, 1, 1)}}), InvalidArgument);
  const auto csv = report_csv(build_report({{"a", outcomes(2, 1, 50)}}, {{"a", outcomes(2, 1, 100)}}));
  CHECK(csv.rfind("benchmark,item_count,accuracy_pct,mean_length,baseline_mean_length,length_reduction_pct\n", 0) == 0);
  CHECK(csv.find("a,2,50.0000,50.0000,100.0000,50.0000\n") != std::string::npos);
  CHECK(csv.find("W-Avg.,2,50.0000") != std::string::npos);
}
