// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "evomerge/evaluation.hpp"
#include "evomerge/merge.hpp"
#include "evomerge/rng.hpp"

namespace evomerge {

// ---------------------------------------------------------------------------
// Dominance, sorting and density (two objectives, minimization).

/// a ≤ b componentwise with at least one strict inequality.
bool dominates(const Fitness& a, const Fitness& b) noexcept;
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

/// Successive non-dominated fronts as index lists. Each front lists indices in
/// ascending order; every index appears exactly once.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Fitness> points);

/// Crowding distance of each member of one front. Boundary members get +inf;
/// an objective with zero range contributes nothing.
std::vector<double> crowding_distance(std::span<const Fitness> front);

/// 2-D hypervolume of the region dominated by `points` and bounded by
/// `reference`. Points not strictly better than the reference in both
/// objectives contribute nothing.
double hypervolume_2d(std::span<const Fitness> points, const Fitness& reference);

// ---------------------------------------------------------------------------
// Search state.

struct Individual {
  Genotype genotype;
  std::optional<ObjectiveVector> objectives;
  std::optional<std::size_t> rank;
  std::optional<double> crowding;
};

struct Population {
  std::vector<Individual> individuals;
  int generation = 0;
};

struct SbxParams {
  double probability = 0.9;
  double distribution_index = 15.0;
};

struct MutationParams {
  /// Per-variable probability; 1/(number of variables) when unset.
  std::optional<double> probability;
  double distribution_index = 20.0;
};

struct Bounds {
  double low = 0.0;
  double high = 1.0;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct SearchConfig {
  int population_size = 20;
  int generations = 10;
  std::uint64_t seed = 0;
  SbxParams sbx;
  MutationParams mutation;
  MergeKind kind = MergeKind::TA;
  std::vector<Bounds> bounds{{0.0, 1.0}};

  /// Default box for each operator: TA λ ∈ [0, 1]; TIES λ ∈ [0, 1],
  /// k ∈ [0.01, 1]; LINEAR ω ∈ [0, 1.5].
  static SearchConfig defaults_for(MergeKind kind);

  double mutation_probability() const;

  /// Throws InvalidArgument for odd or < 4 population sizes, T < 1, bad
  /// operator constants or boxes that violate the genotype invariants.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Variation and selection operators.

/// Binary tournament among two distinct uniformly drawn members: lower rank
/// wins, then larger crowding, then lower index. Returns the winner's index.
std::size_t tournament_select(const Population& pop, Engine& engine);

/// Tournament outcome for a fixed pair of indices.
std::size_t tournament_winner(const Population& pop, std::size_t i, std::size_t j);

/// SBX spread factor for a uniform draw u ∈ [0, 1).
double sbx_spread(double u, double distribution_index);

/// Children of one variable for a given draw: 0.5((1 ± β)x₁ + (1 ∓ β)x₂).
std::pair<double, double> sbx_children(double x1, double x2, double u, double distribution_index);

std::pair<Genotype, Genotype> sbx_crossover(const Genotype& p1, const Genotype& p2,
                                            const SearchConfig& cfg, Engine& engine);

/// Bounded polynomial perturbation of `y` for a draw u ∈ [0, 1).
double polynomial_perturb(double y, const Bounds& bounds, double u, double distribution_index);

Genotype polynomial_mutation(const Genotype& g, const SearchConfig& cfg, Engine& engine);

// ---------------------------------------------------------------------------
// Driver.

struct HistoryEntry {
  Genotype genotype;
  ObjectiveVector objectives;
  int generation = 0;
};

struct ParetoFront {
  /// Mutually non-dominated, sorted by fitness (−accuracy ascending, then
  /// length ascending).
  std::vector<std::pair<Genotype, ObjectiveVector>> members;
};

/// Non-dominated subset of `history`; equal fitness values keep the first
/// occurrence. Throws InvalidArgument on empty input.
ParetoFront extract_pareto(std::span<const HistoryEntry> history);

using EvaluateFn = std::function<ObjectiveVector(const Genotype&)>;

struct SearchOptions {
  unsigned workers = 1;
  /// Called after the initial population and after every generation with the
  /// full history so far.
  std::function<void(const Population&, std::span<const HistoryEntry>)> on_generation;
};

struct SearchResult {
  ParetoFront front;
  std::vector<HistoryEntry> history;
  Population population;
};

/// Raised when an evaluation throws; carries every evaluation completed before
/// the failing one.
class SearchAborted : public Error {
 public:
  SearchAborted(std::string what, std::vector<HistoryEntry> partial, std::exception_ptr cause);
  const std::vector<HistoryEntry>& partial_history() const noexcept { return partial_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::vector<HistoryEntry> partial_;
  std::exception_ptr cause_;
};

/// NSGA-II: N uniform initial genotypes, then T generations of tournament →
/// SBX → polynomial mutation, pooled elitist selection by rank then crowding.
/// Evaluates exactly N·(T + 1) genotypes.
SearchResult run_nsga2(const SearchConfig& cfg, const EvaluateFn& evaluate,
                       const SearchOptions& options = {});

/// Assigns rank and crowding to every member (objectives must be present).
void assign_rank_and_crowding(Population& pop);

}  // namespace evomerge
