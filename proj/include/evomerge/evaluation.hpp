// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evomerge/errors.hpp"
#include "evomerge/merge.hpp"

namespace evomerge {

/// Correctness and output length (tokens) of one candidate on one item.
struct ItemOutcome {
  std::string item_id;
  bool correct = false;
  double length = 0.0;

  friend bool operator==(const ItemOutcome&, const ItemOutcome&) = default;
};

/// Fitness pair in minimization form: (−accuracy, mean length).
using Fitness = std::array<double, 2>;

struct ObjectiveVector {
  double accuracy = 0.0;
  double mean_length = 0.0;

  Fitness fitness() const noexcept { return {-accuracy, mean_length}; }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// Mean correctness and mean length. Throws InvalidArgument on an empty list.
ObjectiveVector compute_objectives(std::span<const ItemOutcome> outcomes);

// ---------------------------------------------------------------------------
// Simulated item-response benchmark.

enum class ResponseKind {
  ThresholdUp,    ///< solved iff λ ≥ t
  ThresholdDown,  ///< solved iff λ ≤ t
  Logistic,       ///< solved with probability σ(a(λ − t))
};

std::string_view to_string(ResponseKind kind) noexcept;
ResponseKind parse_response_kind(std::string_view name);

struct SimItem {
  std::string item_id;
  ResponseKind response_kind = ResponseKind::ThresholdUp;
  double t = 0.5;  ///< threshold, or logistic location b
  double a = 1.0;  ///< logistic slope
  double len_long = 0.0;   ///< tokens at λ = 0
  double len_short = 0.0;  ///< tokens at λ = 1

  friend bool operator==(const SimItem&, const SimItem&) = default;
};

/// σ(a(λ − b)).
template <typename Scalar>
Scalar logistic_response(Scalar a, Scalar b, Scalar lambda) {
  return Scalar(1) / (Scalar(1) + std::exp(-a * (lambda - b)));
}

class SimulatedBenchmark {
 public:
  SimulatedBenchmark() = default;
  /// Throws InvalidArgument on duplicate or empty ids and out-of-range fields.
  SimulatedBenchmark(std::vector<SimItem> items, std::uint64_t noise_seed);

  const std::vector<SimItem>& items() const noexcept { return items_; }
  std::uint64_t noise_seed() const noexcept { return noise_seed_; }
  std::size_t size() const noexcept { return items_.size(); }

  /// Index of `item_id`; throws InvalidArgument when unknown.
  std::size_t index_of(std::string_view item_id) const;

  /// Correctness of item `index` at λ. Logistic items draw from a stream keyed
  /// by (item id, round(λ·10⁶), noise seed).
  bool solves(std::size_t index, double lambda) const;
  double length(std::size_t index, double lambda) const;

  /// Largest len_long over all items (0 when empty).
  double max_length() const noexcept;

 private:
  std::vector<SimItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t noise_seed_ = 0;
};

struct GeneratorOptions {
  std::size_t item_count = 1000;
  double up_fraction = 0.45;
  double down_fraction = 0.45;
  double slope_low = 4.0;
  double slope_high = 12.0;
  double len_long_low = 1500.0;
  double len_long_high = 6000.0;
  double len_short_low = 100.0;
  double len_short_high = 800.0;
};

/// Default benchmark generator. Item kinds are shuffled; ids are "sim-0000", ….
SimulatedBenchmark generate_benchmark(std::uint64_t seed, const GeneratorOptions& options = {});

/// Outcomes at λ on every item, or on `subset` (in the given order).
std::vector<ItemOutcome> evaluate_simulated(const SimulatedBenchmark& bench, double lambda);
std::vector<ItemOutcome> evaluate_simulated(const SimulatedBenchmark& bench, double lambda,
                                            std::span<const std::string> subset);

// ---------------------------------------------------------------------------
// External evaluation records (JSONL).

using RecordSet = std::map<std::string, std::vector<ItemOutcome>>;

/// Parses `{"candidate_id", "item_id", "correct", "length"}` lines grouped by
/// candidate. Errors carry the 1-based line number.
RecordSet parse_record_evaluations(std::string_view text);
RecordSet load_record_evaluations(const std::filesystem::path& path);

/// A candidate id the record file has no entries for.
class MissingCandidate : public Error {
 public:
  explicit MissingCandidate(std::string id);
  const std::string& candidate() const noexcept { return candidate_; }

 private:
  std::string candidate_;
};

// ---------------------------------------------------------------------------
// Evaluators: genotype → per-item outcomes.

class Evaluator {
 public:
  virtual ~Evaluator() = default;

  /// All item ids in benchmark order.
  virtual std::vector<std::string> item_ids() const = 0;

  /// Outcomes on `subset` (every item when empty). Must be safe to call
  /// concurrently and return identical results for identical arguments.
  virtual std::vector<ItemOutcome> evaluate(const Genotype& g,
                                            std::span<const std::string> subset) const = 0;
};

/// Simulated benchmark; accepts TA genotypes (λ only).
class SimulatedEvaluator final : public Evaluator {
 public:
  explicit SimulatedEvaluator(SimulatedBenchmark bench) : bench_(std::move(bench)) {}

  const SimulatedBenchmark& benchmark() const noexcept { return bench_; }
  std::vector<std::string> item_ids() const override;
  std::vector<ItemOutcome> evaluate(const Genotype& g,
                                    std::span<const std::string> subset) const override;

 private:
  SimulatedBenchmark bench_;
};

/// Looks outcomes up by `candidate_id(genotype)`.
class RecordEvaluator final : public Evaluator {
 public:
  explicit RecordEvaluator(RecordSet records);

  std::vector<std::string> item_ids() const override;
  std::vector<ItemOutcome> evaluate(const Genotype& g,
                                    std::span<const std::string> subset) const override;

 private:
  RecordSet records_;
  std::map<std::string, std::map<std::string, ItemOutcome>> by_item_;
  std::vector<std::string> item_ids_;
};

}  // namespace evomerge
