// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/moea.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "evomerge/errors.hpp"
#include "evomerge/parallel.hpp"

namespace evomerge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool dominates(const Fitness& a, const Fitness& b) noexcept {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
  return dominates(a.fitness(), b.fitness());
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Fitness> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(points[p], points[q])) {
        dominated_by[p].push_back(q);
        ++domination_count[q];
      } else if (dominates(points[q], points[p])) {
        dominated_by[q].push_back(p);
        ++domination_count[p];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (domination_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (const auto p : current) {
      for (const auto q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Fitness> front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n <= 2) return std::vector<double>(n, kInf);

  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < 2; ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    const double range = front[order.back()][m] - front[order.front()][m];
    if (range == 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      distance[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / range;
    }
  }
  return distance;
}

double hypervolume_2d(std::span<const Fitness> points, const Fitness& reference) {
  std::vector<Fitness> inside;
  for (const auto& p : points) {
    if (p[0] < reference[0] && p[1] < reference[1]) inside.push_back(p);
  }
  std::sort(inside.begin(), inside.end());
  double volume = 0.0;
  double ceiling = reference[1];
  for (const auto& p : inside) {
    if (p[1] < ceiling) {
      volume += (reference[0] - p[0]) * (ceiling - p[1]);
      ceiling = p[1];
    }
  }
  return volume;
}

// ---------------------------------------------------------------------------

SearchConfig SearchConfig::defaults_for(MergeKind kind) {
  SearchConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case MergeKind::TA: cfg.bounds = {{0.0, 1.0}}; break;
    case MergeKind::TIES: cfg.bounds = {{0.0, 1.0}, {0.01, 1.0}}; break;
    case MergeKind::LINEAR: {
      const LinearBounds box;
      cfg.bounds = {{box.low, box.high}, {box.low, box.high}};
      break;
    }
  }
  return cfg;
}

double SearchConfig::mutation_probability() const {
  return mutation.probability.value_or(1.0 / static_cast<double>(bounds.size()));
}

void SearchConfig::validate() const {
  if (population_size < 4 || population_size % 2 != 0) {
    throw InvalidArgument(
        fmt::format("population size must be even and >= 4, got {}", population_size));
  }
  if (generations < 1) throw InvalidArgument("generations must be >= 1");
  if (!(sbx.probability >= 0.0 && sbx.probability <= 1.0)) {
    throw InvalidArgument("crossover probability outside [0, 1]");
  }
  if (!(sbx.distribution_index > 0.0) || !(mutation.distribution_index > 0.0)) {
    throw InvalidArgument("distribution indices must be positive");
  }
  if (mutation.probability && !(*mutation.probability >= 0.0 && *mutation.probability <= 1.0)) {
    throw InvalidArgument("mutation probability outside [0, 1]");
  }
  if (bounds.size() != genotype_size(kind)) {
    throw InvalidArgument(fmt::format("{} search needs {} bound pair(s), got {}", to_string(kind),
                                      genotype_size(kind), bounds.size()));
  }
  for (const auto& b : bounds) {
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || !(b.low < b.high)) {
      throw InvalidArgument(fmt::format("invalid bounds [{}, {}]", b.low, b.high));
    }
  }
  if (kind != MergeKind::LINEAR && (bounds[0].low < 0.0 || bounds[0].high > 1.0)) {
    throw InvalidArgument("lambda bounds must lie within [0, 1]");
  }
  if (kind == MergeKind::TIES && (bounds[1].low <= 0.0 || bounds[1].high > 1.0)) {
    throw InvalidArgument("density bounds must lie within (0, 1]");
  }
}

// ---------------------------------------------------------------------------

std::size_t tournament_winner(const Population& pop, std::size_t i, std::size_t j) {
  const auto& a = pop.individuals.at(i);
  const auto& b = pop.individuals.at(j);
  if (!a.rank || !b.rank || !a.crowding || !b.crowding) {
    throw InvalidArgument("tournament needs rank and crowding on every individual");
  }
  if (*a.rank != *b.rank) return *a.rank < *b.rank ? i : j;
  if (*a.crowding != *b.crowding) return *a.crowding > *b.crowding ? i : j;
  return std::min(i, j);
}

std::size_t tournament_select(const Population& pop, Engine& engine) {
  const std::size_t n = pop.individuals.size();
  if (n < 2) throw InvalidArgument("tournament needs at least two individuals");
  const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(engine);
  std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(engine);
  if (j >= i) ++j;
  return tournament_winner(pop, i, j);
}

double sbx_spread(double u, double distribution_index) {
  const double exponent = 1.0 / (distribution_index + 1.0);
  return u <= 0.5 ? std::pow(2.0 * u, exponent) : std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
}

std::pair<double, double> sbx_children(double x1, double x2, double u, double distribution_index) {
  const double beta = sbx_spread(u, distribution_index);
  return {0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
          0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)};
}

std::pair<Genotype, Genotype> sbx_crossover(const Genotype& p1, const Genotype& p2,
                                            const SearchConfig& cfg, Engine& engine) {
  if (p1.kind != p2.kind || p1.values.size() != p2.values.size()) {
    throw InvalidArgument("crossover parents must share kind and dimensionality");
  }
  if (p1.values.size() != cfg.bounds.size()) {
    throw InvalidArgument("genotype dimensionality differs from configured bounds");
  }
  std::pair<Genotype, Genotype> children{p1, p2};
  if (!(uniform01(engine) < cfg.sbx.probability)) return children;
  for (std::size_t v = 0; v < p1.values.size(); ++v) {
    const double u = uniform01(engine);
    const double x1 = p1.values[v];
    const double x2 = p2.values[v];
    if (x1 == x2) continue;
    const auto [c1, c2] = sbx_children(x1, x2, u, cfg.sbx.distribution_index);
    const auto& b = cfg.bounds[v];
    children.first.values[v] = std::clamp(c1, b.low, b.high);
    children.second.values[v] = std::clamp(c2, b.low, b.high);
  }
  return children;
}

double polynomial_perturb(double y, const Bounds& bounds, double u, double distribution_index) {
  const double span = bounds.high - bounds.low;
  const double delta1 = (y - bounds.low) / span;
  const double delta2 = (bounds.high - y) / span;
  const double power = 1.0 / (distribution_index + 1.0);
  double deltaq = 0.0;
  if (u < 0.5) {
    const double xy = 1.0 - delta1;
    const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, distribution_index + 1.0);
    deltaq = std::pow(val, power) - 1.0;
  } else {
    const double xy = 1.0 - delta2;
    const double val =
        2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, distribution_index + 1.0);
    deltaq = 1.0 - std::pow(val, power);
  }
  return std::clamp(y + deltaq * span, bounds.low, bounds.high);
}

Genotype polynomial_mutation(const Genotype& g, const SearchConfig& cfg, Engine& engine) {
  if (g.values.size() != cfg.bounds.size()) {
    throw InvalidArgument("genotype dimensionality differs from configured bounds");
  }
  Genotype out = g;
  const double probability = cfg.mutation_probability();
  for (std::size_t v = 0; v < out.values.size(); ++v) {
    if (!(uniform01(engine) < probability)) continue;
    const double u = uniform01(engine);
    out.values[v] =
        polynomial_perturb(std::clamp(out.values[v], cfg.bounds[v].low, cfg.bounds[v].high),
                           cfg.bounds[v], u, cfg.mutation.distribution_index);
  }
  return out;
}

// ---------------------------------------------------------------------------

ParetoFront extract_pareto(std::span<const HistoryEntry> history) {
  if (history.empty()) throw InvalidArgument("cannot extract a front from an empty history");
  std::vector<Fitness> f;
  f.reserve(history.size());
  for (const auto& h : history) f.push_back(h.objectives.fitness());

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < history.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < history.size() && !drop; ++j) {
      drop = dominates(f[j], f[i]) || (j < i && f[j] == f[i]);
    }
    if (!drop) keep.push_back(i);
  }
  std::stable_sort(keep.begin(), keep.end(),
                   [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  ParetoFront front;
  for (const auto i : keep) front.members.emplace_back(history[i].genotype, history[i].objectives);
  return front;
}

SearchAborted::SearchAborted(std::string what, std::vector<HistoryEntry> partial,
                             std::exception_ptr cause)
    : Error(std::move(what)), partial_(std::move(partial)), cause_(std::move(cause)) {}

void assign_rank_and_crowding(Population& pop) {
  std::vector<Fitness> f;
  f.reserve(pop.individuals.size());
  for (const auto& ind : pop.individuals) {
    if (!ind.objectives) throw InvalidArgument("every individual needs objectives before sorting");
    f.push_back(ind.objectives->fitness());
  }
  const auto fronts = fast_nondominated_sort(f);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    std::vector<Fitness> members;
    for (const auto i : fronts[r]) members.push_back(f[i]);
    const auto distance = crowding_distance(members);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      auto& ind = pop.individuals[fronts[r][k]];
      ind.rank = r;
      ind.crowding = distance[k];
    }
  }
}

namespace {

/// Evaluates `genotypes` (possibly concurrently) and appends them to `history`
/// in index order. On failure the successful prefix is kept and SearchAborted
/// is thrown.
std::vector<ObjectiveVector> evaluate_batch(const std::vector<Genotype>& genotypes, int generation,
                                            const EvaluateFn& evaluate, unsigned workers,
                                            std::vector<HistoryEntry>& history) {
  std::vector<ObjectiveVector> results(genotypes.size());
  std::size_t completed = genotypes.size();
  try {
    parallel_for(
        genotypes.size(), workers, [&](std::size_t i) { results[i] = evaluate(genotypes[i]); },
        &completed);
  } catch (const std::exception& e) {
    for (std::size_t i = 0; i < completed; ++i) {
      history.push_back({genotypes[i], results[i], generation});
    }
    throw SearchAborted(fmt::format("evaluation of candidate '{}' in generation {} failed: {}",
                                    candidate_id(genotypes[completed]), generation, e.what()),
                        std::move(history), std::current_exception());
  }
  for (std::size_t i = 0; i < genotypes.size(); ++i) {
    history.push_back({genotypes[i], results[i], generation});
  }
  return results;
}

}  // namespace

SearchResult run_nsga2(const SearchConfig& cfg, const EvaluateFn& evaluate,
                       const SearchOptions& options) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.population_size);
  std::vector<HistoryEntry> history;
  history.reserve(n * static_cast<std::size_t>(cfg.generations + 1));

  std::vector<Genotype> initial(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto engine = substream(cfg.seed, "init", i);
    initial[i].kind = cfg.kind;
    for (const auto& b : cfg.bounds) initial[i].values.push_back(uniform(engine, b.low, b.high));
  }
  const auto initial_objectives = evaluate_batch(initial, 0, evaluate, options.workers, history);

  Population pop;
  for (std::size_t i = 0; i < n; ++i) {
    pop.individuals.push_back({initial[i], initial_objectives[i], std::nullopt, std::nullopt});
  }
  assign_rank_and_crowding(pop);
  if (options.on_generation) options.on_generation(pop, history);

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    const auto g = static_cast<std::uint64_t>(gen);
    std::vector<Genotype> offspring;
    offspring.reserve(n);
    for (std::size_t pair = 0; pair < n / 2; ++pair) {
      auto select_engine = substream(cfg.seed, "tournament", g, pair);
      const auto a = tournament_select(pop, select_engine);
      const auto b = tournament_select(pop, select_engine);
      auto cross_engine = substream(cfg.seed, "sbx", g, pair);
      auto [c1, c2] = sbx_crossover(pop.individuals[a].genotype, pop.individuals[b].genotype, cfg,
                                    cross_engine);
      auto mutate1 = substream(cfg.seed, "mutation", g, 2 * pair);
      auto mutate2 = substream(cfg.seed, "mutation", g, 2 * pair + 1);
      offspring.push_back(polynomial_mutation(c1, cfg, mutate1));
      offspring.push_back(polynomial_mutation(c2, cfg, mutate2));
    }
    const auto offspring_objectives = evaluate_batch(offspring, gen, evaluate, options.workers, history);

    Population pooled;
    pooled.generation = gen;
    pooled.individuals = pop.individuals;
    for (std::size_t i = 0; i < n; ++i) {
      pooled.individuals.push_back({offspring[i], offspring_objectives[i], std::nullopt, std::nullopt});
    }
    assign_rank_and_crowding(pooled);

    std::vector<std::size_t> order(pooled.individuals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = pooled.individuals[a];
      const auto& y = pooled.individuals[b];
      if (*x.rank != *y.rank) return *x.rank < *y.rank;
      return *x.crowding > *y.crowding;
    });

    Population next;
    next.generation = gen;
    for (std::size_t i = 0; i < n; ++i) next.individuals.push_back(pooled.individuals[order[i]]);
    pop = std::move(next);
    if (options.on_generation) options.on_generation(pop, history);
  }

  SearchResult result;
  result.front = extract_pareto(history);
  result.history = std::move(history);
  result.population = std::move(pop);
  return result;
}

}  // namespace evomerge
