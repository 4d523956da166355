// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "evomerge/errors.hpp"
#include "evomerge/moea.hpp"

using namespace evomerge;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Peels fronts by pairwise dominance checks.
std::vector<std::vector<std::size_t>> brute_force_fronts(const std::vector<Fitness>& pts) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<bool> done(pts.size(), false);
  std::size_t remaining = pts.size();
  while (remaining > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (done[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        dominated = !done[j] && dominates(pts[j], pts[i]);
      }
      if (!dominated) front.push_back(i);
    }
    for (const auto i : front) done[i] = true;
    remaining -= front.size();
    fronts.push_back(std::move(front));
  }
  return fronts;
}

Population ranked(std::vector<std::pair<std::size_t, double>> rank_crowding) {
  Population pop;
  for (const auto& [r, c] : rank_crowding) {
    pop.individuals.push_back({{MergeKind::TA, {0.5}}, ObjectiveVector{}, r, c});
  }
  return pop;
}

SearchConfig small_config(int n, int generations, std::uint64_t seed = 0) {
  SearchConfig cfg = SearchConfig::defaults_for(MergeKind::TA);
  cfg.population_size = n;
  cfg.generations = generations;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("dominance") {
  CHECK(dominates(Fitness{-0.8, 100}, Fitness{-0.7, 200}));
  CHECK_FALSE(dominates(Fitness{-0.8, 200}, Fitness{-0.7, 100}));
  CHECK_FALSE(dominates(Fitness{-0.7, 100}, Fitness{-0.8, 200}));
  CHECK_FALSE(dominates(Fitness{-0.7, 100}, Fitness{-0.7, 100}));
  CHECK(dominates(ObjectiveVector{0.8, 100}, ObjectiveVector{0.7, 200}));
}

TEST_CASE("non-dominated sorting") {
  CHECK(fast_nondominated_sort(std::vector<Fitness>{{1, 5}, {2, 3}, {3, 1}}) ==
        std::vector<std::vector<std::size_t>>{{0, 1, 2}});
  CHECK(fast_nondominated_sort(std::vector<Fitness>{{1, 1}, {2, 2}}) ==
        std::vector<std::vector<std::size_t>>{{0}, {1}});

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 200);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::uniform_real_distribution<double> fine(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Fitness> pts(trial == 0 ? 50 : size(rng));
    const bool ties = trial % 2 == 0;
    for (auto& p : pts) {
      p = ties ? Fitness{double(coarse(rng)), double(coarse(rng))} : Fitness{fine(rng), fine(rng)};
    }
    REQUIRE(fast_nondominated_sort(pts) == brute_force_fronts(pts));
  }
}

TEST_CASE("crowding distance") {
  const auto d = crowding_distance(std::vector<Fitness>{{0, 10}, {5, 5}, {10, 0}});
  CHECK(d[0] == kInf);
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(d[2] == kInf);
  CHECK(crowding_distance(std::vector<Fitness>{{1, 1}}) == std::vector<double>{kInf});
  CHECK(crowding_distance(std::vector<Fitness>{{1, 2}, {2, 1}}) == std::vector<double>{kInf, kInf});
  const auto flat = crowding_distance(std::vector<Fitness>{{0, 1}, {1, 1}, {2, 1}});
  CHECK(flat[1] == doctest::Approx(1.0));
}

TEST_CASE("hypervolume") {
  const std::vector<Fitness> pts = {{-0.8, 300}, {-0.5, 100}};
  CHECK(hypervolume_2d(pts, {0, 1000}) == doctest::Approx(0.5 * 900 + 0.3 * 700));
  CHECK(hypervolume_2d(std::vector<Fitness>{{0.1, 10}}, {0, 1000}) == 0.0);
  const std::vector<Fitness> with_dominated = {{-0.8, 300}, {-0.5, 100}, {-0.4, 500}};
  CHECK(hypervolume_2d(with_dominated, {0, 1000}) == hypervolume_2d(pts, {0, 1000}));
}

TEST_CASE("tournament") {
  CHECK(tournament_winner(ranked({{0, 1.0}, {1, 5.0}}), 0, 1) == 0);
  CHECK(tournament_winner(ranked({{1, 1.0}, {0, 5.0}}), 0, 1) == 1);
  CHECK(tournament_winner(ranked({{0, kInf}, {0, 2.0}}), 1, 0) == 0);
  CHECK(tournament_winner(ranked({{0, 2.0}, {0, 2.0}}), 1, 0) == 0);

  const auto pop = ranked({{0, 1.0}, {1, 1.0}, {2, 1.0}});
  Engine engine(3);
  int wins_of_last = 0;
  for (int i = 0; i < 1000; ++i) wins_of_last += tournament_select(pop, engine) == 2;
  CHECK(wins_of_last == 0);
}

TEST_CASE("SBX") {
  CHECK(sbx_spread(0.5, 15) == 1.0);
  const auto [c1, c2] = sbx_children(0.2, 0.6, 0.5, 15);
  CHECK(c1 == doctest::Approx(0.2));
  CHECK(c2 == doctest::Approx(0.6));
  CHECK(sbx_spread(0.25, 1.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(sbx_spread(0.75, 1.0) == doctest::Approx(std::sqrt(2.0)));

  auto cfg = SearchConfig::defaults_for(MergeKind::TIES);
  const Genotype p1{MergeKind::TIES, {0.1, 0.3}}, p2{MergeKind::TIES, {0.9, 0.8}};
  Engine engine(5);
  SUBCASE("probability zero copies parents") {
    cfg.sbx.probability = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto [a, b] = sbx_crossover(p1, p2, cfg, engine);
      REQUIRE(a == p1);
      REQUIRE(b == p2);
    }
  }
  SUBCASE("identical parents give identical children") {
    for (int i = 0; i < 100; ++i) {
      const auto [a, b] = sbx_crossover(p1, p1, cfg, engine);
      REQUIRE(a == p1);
      REQUIRE(b == p1);
    }
  }
  SUBCASE("children stay in bounds and keep the midpoint when unclamped") {
    for (int i = 0; i < 10000; ++i) {
      const auto [a, b] = sbx_crossover(p1, p2, cfg, engine);
      for (std::size_t v = 0; v < 2; ++v) {
        REQUIRE(a.values[v] >= cfg.bounds[v].low);
        REQUIRE(a.values[v] <= cfg.bounds[v].high);
        REQUIRE(b.values[v] >= cfg.bounds[v].low);
        REQUIRE(b.values[v] <= cfg.bounds[v].high);
      }
    }
  }
  CHECK_THROWS_AS(sbx_crossover(p1, Genotype{MergeKind::TA, {0.5}}, cfg, engine), InvalidArgument);
}

TEST_CASE("polynomial mutation") {
  auto cfg = SearchConfig::defaults_for(MergeKind::LINEAR);
  CHECK(cfg.mutation_probability() == 0.5);
  Engine engine(8);
  const Genotype g{MergeKind::LINEAR, {0.0, 1.5}};
  SUBCASE("probability zero leaves the genotype unchanged") {
    cfg.mutation.probability = 0.0;
    for (int i = 0; i < 100; ++i) REQUIRE(polynomial_mutation(g, cfg, engine) == g);
  }
  SUBCASE("perturbations at the bounds stay inside") {
    CHECK(polynomial_perturb(0.0, {0.0, 1.0}, 0.01, 20) >= 0.0);
    CHECK(polynomial_perturb(1.0, {0.0, 1.0}, 0.99, 20) <= 1.0);
    CHECK(polynomial_perturb(0.3, {0.0, 1.0}, 0.5, 20) == doctest::Approx(0.3));
  }
  SUBCASE("random draws satisfy genotype invariants") {
    cfg.mutation.probability = 1.0;
    for (int i = 0; i < 10000; ++i) {
      const auto m = polynomial_mutation(g, cfg, engine);
      REQUIRE_NOTHROW(validate_genotype(m));
    }
    auto ties = SearchConfig::defaults_for(MergeKind::TIES);
    ties.mutation.probability = 1.0;
    const Genotype t{MergeKind::TIES, {1.0, 0.01}};
    for (int i = 0; i < 10000; ++i) REQUIRE_NOTHROW(validate_genotype(polynomial_mutation(t, ties, engine)));
  }
}

TEST_CASE("pareto extraction") {
  const std::vector<HistoryEntry> h = {{{MergeKind::TA, {0.1}}, {0.5, 100}, 0},
                                       {{MergeKind::TA, {0.2}}, {0.6, 120}, 0},
                                       {{MergeKind::TA, {0.3}}, {0.5, 130}, 0}};
  const auto f = extract_pareto(h);
  REQUIRE(f.members.size() == 2);
  CHECK(f.members[0].second == ObjectiveVector{0.6, 120});
  CHECK(f.members[1].second == ObjectiveVector{0.5, 100});
  CHECK(extract_pareto(std::span(h).first(1)).members.size() == 1);

  const std::vector<HistoryEntry> dup = {{{MergeKind::TA, {0.1}}, {0.5, 100}, 0},
                                         {{MergeKind::TA, {0.2}}, {0.5, 100}, 1}};
  const auto d = extract_pareto(dup);
  REQUIRE(d.members.size() == 1);
  CHECK(d.members[0].first.values[0] == 0.1);

  const std::vector<HistoryEntry> spread = {{{MergeKind::TA, {0.1}}, {0.1, 10}, 0},
                                            {{MergeKind::TA, {0.2}}, {0.2, 20}, 0},
                                            {{MergeKind::TA, {0.3}}, {0.3, 30}, 0}};
  CHECK(extract_pareto(spread).members.size() == 3);
  CHECK_THROWS_AS(extract_pareto(std::vector<HistoryEntry>{}), InvalidArgument);
}

TEST_CASE("search configuration") {
  CHECK_NOTHROW(SearchConfig{}.validate());
  auto cfg = small_config(5, 1);
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = small_config(4, 0);
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = small_config(4, 1);
  cfg.bounds = {{0.0, 1.2}};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  const auto ties = SearchConfig::defaults_for(MergeKind::TIES);
  CHECK(ties.bounds == std::vector<Bounds>{{0.0, 1.0}, {0.01, 1.0}});
}

TEST_CASE("NSGA-II") {
  const EvaluateFn affine = [](const Genotype& g) {
    return ObjectiveVector{g.values[0], g.values[0]};  // fitness (−λ, λ)
  };

  SUBCASE("affine objectives keep the evaluated extremes") {
    const auto result = run_nsga2(small_config(4, 1), affine);
    CHECK(result.history.size() == 8);
    double lo = 1.0, hi = 0.0;
    for (const auto& h : result.history) {
      lo = std::min(lo, h.genotype.values[0]);
      hi = std::max(hi, h.genotype.values[0]);
    }
    CHECK(result.front.members.size() >= 2);
    CHECK(result.front.members.front().first.values[0] == hi);
    CHECK(result.front.members.back().first.values[0] == lo);
  }
  SUBCASE("evaluation budget and bounds closure") {
    auto cfg = SearchConfig::defaults_for(MergeKind::LINEAR);
    const EvaluateFn f = [](const Genotype& g) {
      return ObjectiveVector{g.values[1] / 1.5, 100 * (g.values[0] + g.values[1])};
    };
    const auto result = run_nsga2(cfg, f);
    CHECK(result.history.size() == 220);
    for (const auto& h : result.history) REQUIRE_NOTHROW(validate_genotype(h.genotype));
    for (const auto& [g, o] : result.front.members) {
      for (const auto& h : result.history) REQUIRE_FALSE(dominates(h.objectives, o));
    }
  }
  SUBCASE("constant landscape") {
    const auto result =
        run_nsga2(small_config(6, 3), [](const Genotype&) { return ObjectiveVector{0.5, 10}; });
    CHECK(result.front.members.size() == 1);
    CHECK(result.history.size() == 24);
  }
  SUBCASE("elitism keeps each objective's best") {
    const EvaluateFn bumpy = [](const Genotype& g) {
      const double x = g.values[0];
      return ObjectiveVector{std::sin(9 * x) * 0.5 + 0.5, 1000 * x * x};
    };
    double best_acc = -1, best_len = 1e9;
    SearchOptions opts;
    opts.on_generation = [&](const Population& pop, std::span<const HistoryEntry>) {
      double acc = -1, len = 1e9;
      for (const auto& ind : pop.individuals) {
        acc = std::max(acc, ind.objectives->accuracy);
        len = std::min(len, ind.objectives->mean_length);
      }
      CHECK(acc >= best_acc);
      CHECK(len <= best_len);
      best_acc = acc;
      best_len = len;
    };
    run_nsga2(small_config(10, 8, 4), bumpy, opts);
  }
  SUBCASE("deterministic across worker counts") {
    const EvaluateFn f = [](const Genotype& g) {
      return ObjectiveVector{std::round(g.values[0] * 20) / 20, 1000 * (1 - g.values[0])};
    };
    auto cfg = small_config(12, 5, 42);
    const auto a = run_nsga2(cfg, f, {1, {}});
    const auto b = run_nsga2(cfg, f, {4, {}});
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      REQUIRE(a.history[i].genotype == b.history[i].genotype);
      REQUIRE(a.history[i].objectives == b.history[i].objectives);
    }
  }
  SUBCASE("a failing evaluation aborts with the partial history") {
    int calls = 0;
    const EvaluateFn flaky = [&](const Genotype& g) {
      if (++calls == 7) throw Error("boom");
      return ObjectiveVector{g.values[0], 1 - g.values[0]};
    };
    try {
      run_nsga2(small_config(4, 3), flaky);
      FAIL("expected SearchAborted");
    } catch (const SearchAborted& e) {
      CHECK(e.partial_history().size() == 6);
      CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
  }
}
