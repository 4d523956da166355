// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evomerge/evaluation.hpp"
#include "evomerge/moea.hpp"
#include "evomerge/serialization.hpp"
#include "evomerge/subset.hpp"

namespace evomerge {

/// Where candidate outcomes come from. Exactly one of a simulated benchmark
/// (file or generator seed) or a record file.
struct EvaluatorSource {
  std::optional<std::filesystem::path> benchmark;
  std::optional<std::uint64_t> generator_seed;
  /// Noise seed for logistic items of a benchmark read from file.
  std::uint64_t noise_seed = 0;
  std::optional<std::filesystem::path> records;

  bool simulated() const noexcept { return !records.has_value(); }
};

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSource& source);

struct SubsetSpec {
  /// Explicit item ids; when set, strategy/size/seed are ignored.
  std::optional<std::vector<std::string>> item_ids;
  /// Use every benchmark item.
  bool full = false;
  SubsetStrategy strategy = SubsetStrategy::Entropy;
  std::size_t size = 50;
  std::uint64_t seed = 0;
  int calibration_models = 10;
};

struct MergeSpec {
  MergeKind kind = MergeKind::TA;
  std::optional<std::filesystem::path> system2;
  std::optional<std::filesystem::path> system1;
};

struct RunConfig {
  SearchConfig search;
  EvaluatorSource evaluator;
  SubsetSpec subset;
  MergeSpec merge;
  std::filesystem::path output_dir = "run";

  /// Reads the JSON layout documented in the README; missing fields take the
  /// defaults N=20, T=10, K=10, |S|=50, seed 0.
  static RunConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;
};

/// Candidates that need external evaluation records. The manifest has been
/// written to `manifest()` by the time this is thrown.
class RecordsRequired : public Error {
 public:
  RecordsRequired(std::vector<Genotype> candidates, std::filesystem::path manifest);
  const std::vector<Genotype>& candidates() const noexcept { return candidates_; }
  const std::filesystem::path& manifest() const noexcept { return manifest_; }

 private:
  std::vector<Genotype> candidates_;
  std::filesystem::path manifest_;
};

/// Writes one manifest line per genotype, replacing `path`.
void write_manifest(const std::filesystem::path& path, const std::vector<Genotype>& candidates);

/// Calibration matrix over `uniform_lambda_grid(k)`. For record evaluators
/// with missing grid candidates, writes `manifest` and throws RecordsRequired.
CorrectnessMatrix run_calibration(const Evaluator& evaluator, int k, unsigned workers,
                                  const std::filesystem::path& manifest);

/// Resolves the evaluation subset of a run (explicit, full, or selected from
/// a calibration matrix).
EvaluationSubset resolve_subset(const Evaluator& evaluator, const SubsetSpec& spec,
                                unsigned workers, const std::filesystem::path& manifest);

struct FrontRow {
  Genotype genotype;
  ObjectiveVector subset;
  std::optional<ObjectiveVector> full;
  std::optional<double> length_reduction;  ///< % vs TA λ = 0 on the subset
};

struct EvolveOutcome {
  SearchResult search;
  EvaluationSubset subset;
  std::vector<FrontRow> front;
};

/// Runs the search and persists `config.json`, `subset.json`, `history.jsonl`
/// and `pareto.json` (rewritten atomically after every generation) plus
/// `front.csv` under `cfg.output_dir`. On evaluation failure the partial
/// history is kept on disk; missing records additionally produce
/// `candidates.jsonl`.
EvolveOutcome run_evolve(const RunConfig& cfg, unsigned workers = 1);

std::string front_table(const std::vector<FrontRow>& rows);
std::string front_csv(const std::vector<FrontRow>& rows);

/// Rows of `strategy,size,seed,rho`.
std::string fidelity_csv(std::span<const FidelityRow> rows);
/// Rows of `strategy,size,mean_rho,seeds`.
std::string fidelity_mean_csv(std::span<const FidelityMean> rows);

/// Splits outcomes into benchmarks by the item-id prefix before the first '/'
/// ("all" when an id has none).
std::map<std::string, std::vector<ItemOutcome>> group_by_benchmark(
    std::span<const ItemOutcome> outcomes);

}  // namespace evomerge
